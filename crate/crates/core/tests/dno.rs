use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zakharov_core::dno::DnoContext;
use zakharov_core::fit;
use zakharov_core::spectral::{divergence, fourier_multiplier, norm, sobolev_norm, CutoffFamily};
use zakharov_core::strip::{default_vertical, SolverSettings, StripDiscretization};
use zakharov_core::suites::random_smooth;
use zakharov_core::{Grid, RealField};

fn ctx(eta: &RealField) -> DnoContext {
    let grid = *eta.grid();
    let disc = StripDiscretization::new(grid, default_vertical(&grid, 48).unwrap(), SolverSettings::default()).unwrap();
    DnoContext::new(Arc::new(disc), eta, 1.0).unwrap()
}

fn abs_d(u: &RealField) -> RealField {
    fourier_multiplier(u, |xi| Complex64::new(norm(xi), 0.0)).unwrap()
}

#[test]
fn curved_surface_exact_harmonic_oracle() {
    // G(η)[e^{kη}cos kx] = k e^{kη}(cos kx + η' sin kx).
    let grid = Grid::unit_1d(64).unwrap();
    let eta = RealField::from_fn(grid, |x| 0.2 * x[0].cos() + 0.1 * (2.0 * x[0]).sin());
    let deta = eta.derivative(0);
    let c = ctx(&eta);
    for k in [1.0, 3.0] {
        let f = RealField::from_fn(grid, |x| (k * x[0]).cos()).zip_map(&eta, |c, e| (k * e).exp() * c);
        let nodes = grid.nodes();
        let expect = RealField::new(
            grid,
            (0..grid.len())
                .map(|j| {
                    let x = nodes[j][0];
                    k * (k * eta.values()[j]).exp() * ((k * x).cos() + deta.values()[j] * (k * x).sin())
                })
                .collect(),
        )
        .unwrap();
        let err = c.dn_apply(&f).unwrap().sub(&expect).max_abs() / expect.max_abs();
        assert!(err < 1e-9, "k = {k}: {err}");
    }
}

#[test]
fn first_order_expansion_at_flat_surface() {
    // G(εh)f = |D|f − ε(|D|(h|D|f) + ∂(h∂f)) + O(ε²).
    let grid = Grid::unit_1d(64).unwrap();
    let f = RealField::from_fn(grid, |x| x[0].cos());
    let h = RealField::from_fn(grid, |x| x[0].cos());
    let d1 = abs_d(&h.mul(&abs_d(&f))).add(&h.mul(&f.derivative(0)).derivative(0)).scale(-1.0);
    let err = |eps: f64| {
        let g = ctx(&h.scale(eps)).dn_apply(&f).unwrap();
        g.sub(&abs_d(&f)).sub(&d1.scale(eps)).max_abs()
    };
    let (e1, e2) = (err(0.05), err(0.025));
    assert!(e1 < 0.05 * 0.05 * 2.0, "{e1}");
    assert!((fit::order(0.05, e1, 0.025, e2) - 2.0).abs() < 0.15, "{e1} {e2}");
}

#[test]
fn flat_shape_derivative_example() {
    let grid = Grid::unit_1d(32).unwrap();
    let c = ctx(&RealField::zeros(grid));
    let cos = RealField::from_fn(grid, |x| x[0].cos());
    let expect = abs_d(&cos.mul(&abs_d(&cos))).scale(-1.0).sub(&divergence(&[cos.mul(&cos.derivative(0))]));
    let got = c.shape_derivative(&cos, &cos).unwrap();
    assert!(got.sub(&expect).max_abs() < 1e-10);
    assert_eq!(c.shape_derivative(&cos, &RealField::zeros(grid)).unwrap().max_abs(), 0.0);
}

#[test]
fn commutes_with_translation() {
    let grid = Grid::unit_1d(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let eta = random_smooth(grid, &mut rng, 5, 2.0).scale(0.15);
    let f = random_smooth(grid, &mut rng, 8, 1.5);
    let shift = |u: &RealField, m: usize| {
        let mut v = u.values().to_vec();
        v.rotate_left(m);
        RealField::new(grid, v).unwrap()
    };
    let base = ctx(&eta).dn_apply(&f).unwrap();
    for m in [1, 7, 32] {
        let moved = ctx(&shift(&eta, m)).dn_apply(&shift(&f, m)).unwrap();
        assert!(moved.sub(&shift(&base, m)).max_abs() < 1e-9 * base.max_abs(), "shift {m}");
    }
}

#[test]
fn traces_reconstruct_surface_gradient() {
    let grid = Grid::new(2, 16, std::f64::consts::TAU).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let eta = random_smooth(grid, &mut rng, 3, 2.0).scale(0.1);
    let psi = random_smooth(grid, &mut rng, 4, 1.5);
    let c = ctx(&eta);
    let t = c.traces(&psi).unwrap();
    for (i, gp) in psi.gradient().iter().enumerate() {
        let rebuilt = t.v[i].add(&t.b.mul(&c.grad_eta()[i]));
        assert!(rebuilt.sub(gp).max_abs() < 1e-12 * (1.0 + gp.max_abs()));
    }
    let k = c.traces(&RealField::constant(grid, 2.5)).unwrap();
    assert!(k.b.max_abs() < 1e-10);
    assert!(k.v.iter().all(|v| v.max_abs() < 1e-10));
}

#[test]
fn flat_remainder_is_low_frequency_multiplier() {
    let grid = Grid::unit_1d(64).unwrap();
    let c = ctx(&RealField::zeros(grid));
    let f = RealField::from_fn(grid, |x| x[0].cos() + (3.0 * x[0]).sin() + 0.5 * (12.0 * x[0]).cos());
    let expect = fourier_multiplier(&f, |xi| {
        let r = norm(xi);
        Complex64::new((1.0 - CutoffFamily::psi_cut(r)) * r, 0.0)
    })
    .unwrap();
    let r = c.dn_paralinear_remainder(&f).unwrap();
    assert!(r.sub(&expect).max_abs() < 1e-10);
    // Only |ξ| < 2 survives.
    let high = RealField::from_fn(grid, |x| (3.0 * x[0]).sin() + (12.0 * x[0]).cos());
    assert!(c.dn_paralinear_remainder(&high).unwrap().max_abs() < 1e-10);
}

#[test]
fn remainder_of_constant_vanishes_and_symbol_is_elliptic() {
    let grid = Grid::unit_1d(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let eta = random_smooth(grid, &mut rng, 5, 2.0).scale(0.2);
    let c = ctx(&eta);
    assert!(c.dn_paralinear_remainder(&RealField::constant(grid, 3.0)).unwrap().max_abs() < 1e-9);
    assert!(c.lambda_ellipticity() > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn self_adjoint_and_positive(seed in any::<u64>(), slope in 0.05f64..0.3) {
        let grid = Grid::unit_1d(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = random_smooth(grid, &mut rng, 4, 2.0);
        let eta = raw.scale(slope / raw.derivative(0).max_abs());
        let f = random_smooth(grid, &mut rng, 6, 1.5);
        let g = random_smooth(grid, &mut rng, 6, 1.5);
        let c = ctx(&eta);
        let (gf, gg) = (c.dn_apply(&f).unwrap(), c.dn_apply(&g).unwrap());
        let (nf, ng) = (sobolev_norm(&f, 1.0), sobolev_norm(&g, 1.0));
        prop_assert!((gf.inner(&g) - f.inner(&gg)).abs() <= 1e-8 * nf * ng);
        prop_assert!(gf.inner(&f) >= -1e-10 * nf * nf);
        prop_assert!(gf.mean().abs() <= 1e-10 * nf);
    }
}
