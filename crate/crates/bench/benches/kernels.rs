use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use zakharov_bench::{profile, wave_state};
use zakharov_core::dno::DnoContext;
use zakharov_core::dynamics::{Integrator, IntegratorConfig};
use zakharov_core::paradiff::{paradiff_apply, paraproduct, FnSymbol};
use zakharov_core::spectral::DyadicBlocks;
use zakharov_core::strip::{default_vertical, SolverSettings, StripDiscretization};
use zakharov_core::Grid;

fn disc(grid: Grid, levels: usize) -> Arc<StripDiscretization> {
    Arc::new(StripDiscretization::new(grid, default_vertical(&grid, levels).unwrap(), SolverSettings::default()).unwrap())
}

fn littlewood_paley(c: &mut Criterion) {
    let mut g = c.benchmark_group("lp_decompose");
    for n in [256usize, 1024, 4096] {
        let u = profile(Grid::unit_1d(n).unwrap(), 1.0);
        g.bench_with_input(BenchmarkId::from_parameter(n), &u, |b, u| b.iter(|| DyadicBlocks::decompose(black_box(u))));
    }
    g.finish();
}

fn paradifferential(c: &mut Criterion) {
    let mut g = c.benchmark_group("paradiff");
    for n in [64usize, 128] {
        let grid = Grid::unit_1d(n).unwrap();
        let a = profile(grid, 1.0);
        let u = profile(grid, 0.5).derivative(0);
        g.bench_with_input(BenchmarkId::new("paraproduct", n), &n, |b, _| b.iter(|| paraproduct(&a, black_box(&u))));
        let sym = FnSymbol::new(grid, 1.0, |j: usize, xi: [f64; 2]| {
            num_complex::Complex64::new((1.0 + a.values()[j].powi(2)) * xi[0].abs(), 0.0)
        });
        g.bench_with_input(BenchmarkId::new("paradiff_apply", n), &n, |b, _| b.iter(|| paradiff_apply(&sym, black_box(&u))));
    }
    g.finish();
}

fn dirichlet_neumann(c: &mut Criterion) {
    let mut g = c.benchmark_group("dn_apply");
    g.sample_size(20);
    for (n, m) in [(64usize, 32usize), (256, 48)] {
        let grid = Grid::unit_1d(n).unwrap();
        let s = wave_state(grid);
        let ctx = DnoContext::new(disc(grid, m), &s.eta, 1.0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(format!("n{n}_m{m}")), &s, |b, s| {
            b.iter(|| ctx.dn_apply(black_box(&s.psi)).unwrap())
        });
    }
    g.finish();
}

fn rk4_step(c: &mut Criterion) {
    let mut g = c.benchmark_group("rk4_step");
    g.sample_size(10);
    for (n, m) in [(64usize, 32usize), (256, 24)] {
        let grid = Grid::unit_1d(n).unwrap();
        let s = wave_state(grid);
        let integ = Integrator::new(disc(grid, m), IntegratorConfig { dt: 1e-3, ..IntegratorConfig::default() }).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(format!("n{n}_m{m}")), &s, |b, s| {
            b.iter(|| integ.step(black_box(s)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(kernels, littlewood_paley, paradifferential, dirichlet_neumann, rk4_step);
criterion_main!(kernels);
