use std::f64::consts::PI;
use std::sync::Arc;

use zakharov_core::dno::DnoContext;
use zakharov_core::dynamics::{
    e0, energy, pressure_solve, Integrator, IntegratorConfig, SurfaceState,
};
use zakharov_core::fit;
use zakharov_core::spectral::{dot_fields, lp_norm};
use zakharov_core::strip::{default_vertical, dirichlet_energy, SolverSettings, StripDiscretization};
use zakharov_core::{Error, Grid, RealField};

fn disc(grid: Grid, levels: usize) -> Arc<StripDiscretization> {
    Arc::new(StripDiscretization::new(grid, default_vertical(&grid, levels).unwrap(), SolverSettings::default()).unwrap())
}

fn integ(d: &Arc<StripDiscretization>, dt: f64) -> Integrator {
    Integrator::new(d.clone(), IntegratorConfig { dt, ..IntegratorConfig::default() }).unwrap()
}

fn wave(grid: Grid, amp: f64) -> SurfaceState {
    let eta = RealField::from_fn(grid, |x| amp * x[0].cos() + 0.3 * amp * (2.0 * x[0] + 0.4).sin());
    let psi = RealField::from_fn(grid, |x| amp * x[0].sin());
    SurfaceState::new(0.0, eta, psi, 1.0).unwrap()
}

fn dist(a: &SurfaceState, b: &SurfaceState) -> f64 {
    a.eta.sub(&b.eta).max_abs().max(a.psi.sub(&b.psi).max_abs())
}

#[test]
fn rk4_is_fourth_order() {
    let grid = Grid::unit_1d(32).unwrap();
    let d = disc(grid, 32);
    let s0 = wave(grid, 0.05);
    let t = 0.8;
    let reference = integ(&d, t / 64.0).advance(&s0, t).unwrap();
    let hs = [t / 4.0, t / 8.0, t / 16.0];
    let errs: Vec<f64> = hs.iter().map(|&h| dist(&integ(&d, h).advance(&s0, t).unwrap(), &reference)).collect();
    let logs: Vec<f64> = hs.iter().map(|h| h.log2()).collect();
    let order = fit::log2_slope(&logs, &errs);
    assert!(order >= 3.8, "order {order}, errors {errs:?}");
}

#[test]
fn linear_wave_returns_after_one_period() {
    // The half-difference of the runs at ±amp removes the even-order response,
    // leaving the linearized flow.
    let grid = Grid::unit_1d(16).unwrap();
    let d = disc(grid, 32);
    let amp = 1e-6;
    let period = 2.0 * PI / 2f64.sqrt();
    let i = integ(&d, period / 400.0);
    let run = |a: f64| {
        let s0 = SurfaceState::new(0.0, RealField::from_fn(grid, |x| a * (2.0 * x[0]).cos()), RealField::zeros(grid), 1.0)
            .unwrap();
        (i.advance(&s0, period).unwrap(), s0)
    };
    let ((p, s0), (m, _)) = (run(amp), run(-amp));
    let eta = p.eta.sub(&m.eta).scale(0.5);
    let psi = p.psi.sub(&m.psi).scale(0.5);
    let rel = eta.sub(&s0.eta).max_abs().max(psi.max_abs()) / amp;
    assert!(rel <= 1e-8, "{rel}");
    // The raw state carries the quadratic response, of relative size ~ amp·k.
    let raw = dist(&p, &s0) / amp;
    assert!(raw <= 5.0 * amp * 2.0, "{raw}");
}

#[test]
fn integration_is_reversible() {
    let grid = Grid::unit_1d(32).unwrap();
    let d = disc(grid, 32);
    let s0 = wave(grid, 0.05);
    let forward = integ(&d, 0.01).advance(&s0, 0.5).unwrap();
    let back = integ(&d, -0.01).advance(&forward, 0.0).unwrap();
    assert!(back.t.abs() < 1e-12);
    assert!(dist(&back, &s0) <= 1e-7, "{}", dist(&back, &s0));
}

#[test]
fn rest_state_is_fixed() {
    let grid = Grid::new(2, 8, 2.0 * PI).unwrap();
    let s0 = SurfaceState::rest(grid, 9.81);
    let s = Integrator::with_defaults(grid, 0.1).unwrap().step(&s0).unwrap();
    assert_eq!(s.eta, s0.eta);
    assert_eq!(s.psi, s0.psi);
    assert!((s.t - 0.1).abs() < 1e-15);
}

fn kinematic_rate(d: &Arc<StripDiscretization>, s: &SurfaceState) -> RealField {
    let ctx = DnoContext::new(d.clone(), &s.eta, 1.0).unwrap();
    let t = ctx.traces(&s.psi).unwrap();
    t.b.sub(&dot_fields(&t.v, ctx.grad_eta()))
}

#[test]
fn elevation_increment_matches_trace_kinematics() {
    // η(h) − η(0) against Simpson's rule for ∫(B − V·∇η); residual per unit time is O(h⁴).
    let grid = Grid::unit_1d(32).unwrap();
    let d = disc(grid, 48);
    let s0 = wave(grid, 0.08);
    let k0 = kinematic_rate(&d, &s0);
    let err = |h: f64| {
        let i = integ(&d, h / 2.0);
        let mid = i.step(&s0).unwrap();
        let end = i.step(&mid).unwrap();
        let quad = k0.add(&kinematic_rate(&d, &mid).scale(4.0)).add(&kinematic_rate(&d, &end)).scale(h / 6.0);
        end.eta.sub(&s0.eta).sub(&quad).max_abs() / h
    };
    let hs = [0.2, 0.1, 0.05];
    let errs: Vec<f64> = hs.iter().map(|&h| err(h)).collect();
    let logs: Vec<f64> = hs.iter().map(|h: &f64| h.log2()).collect();
    let order = fit::log2_slope(&logs, &errs);
    assert!(order >= 3.6, "order {order}, residuals {errs:?}");
}

#[test]
fn vertical_momentum_identity() {
    // (∂_t + V·∇)B = a − g with a central difference in time.
    let grid = Grid::unit_1d(32).unwrap();
    let d = disc(grid, 48);
    let s0 = wave(grid, 0.08);
    let ctx = DnoContext::new(d.clone(), &s0.eta, 1.0).unwrap();
    let bundle = pressure_solve(&s0, &ctx).unwrap();
    let tr = &bundle.traces;
    let target = bundle.a.map(|a| a - 1.0);
    let b_at = |s: &SurfaceState| DnoContext::new(d.clone(), &s.eta, 1.0).unwrap().traces(&s.psi).unwrap().b;
    let err = |h: f64| {
        let p = integ(&d, h / 2.0).advance(&s0, h).unwrap();
        let m = integ(&d, -h / 2.0).advance(&s0, -h).unwrap();
        let dtb = b_at(&p).sub(&b_at(&m)).scale(0.5 / h);
        let adv = dot_fields(&tr.v, &tr.b.gradient());
        dtb.add(&adv).sub(&target).max_abs()
    };
    let (e1, e2) = (err(0.04), err(0.02));
    assert!(fit::order(0.04, e1, 0.02, e2) >= 1.8, "{e1} {e2}");
}

#[test]
fn energy_is_conserved_on_a_short_run() {
    let grid = Grid::unit_1d(32).unwrap();
    let d = disc(grid, 32);
    let i = integ(&d, 0.01);
    let s0 = wave(grid, 0.05);
    let h0 = energy(&s0, &i.context(&s0.eta).unwrap()).unwrap();
    let s = i.advance(&s0, 1.0).unwrap();
    let h1 = energy(&s, &i.context(&s.eta).unwrap()).unwrap();
    assert!((h1 - h0).abs() <= 1e-8 * h0, "{h0} {h1}");
}

#[test]
fn e0_matches_strip_energy() {
    let grid = Grid::unit_1d(32).unwrap();
    let d = disc(grid, 64);
    let s = wave(grid, 0.1);
    let ctx = DnoContext::new(d, &s.eta, 1.0).unwrap();
    let v = ctx.extend(&s.psi).unwrap();
    let strip = dirichlet_energy(&v, ctx.solver().map());
    let e = e0(&s, &ctx).unwrap();
    assert!((e * e - strip).abs() <= 1e-6 * strip, "{} vs {strip}", e * e);
}

#[test]
fn huge_step_reports_blow_up() {
    let grid = Grid::unit_1d(32).unwrap();
    let d = disc(grid, 16);
    let s0 = wave(grid, 0.2);
    let i = integ(&d, 50.0);
    let mut s = s0;
    let mut outcome = Ok(());
    for _ in 0..20 {
        match i.step(&s) {
            Ok(next) => s = next,
            Err(e) => {
                outcome = Err(e);
                break;
            }
        }
    }
    assert!(
        matches!(outcome, Err(Error::BlowUp { .. } | Error::IllConditioned { .. } | Error::SurfaceTooRough { .. })),
        "{outcome:?}"
    );
}

#[test]
fn taylor_coefficient_positive_and_normal_derivative_consistent() {
    let grid = Grid::unit_1d(32).unwrap();
    let s = SurfaceState::new(0.0, RealField::from_fn(grid, |x| 0.1 * x[0].cos()), RealField::zeros(grid), 1.0).unwrap();
    let ctx = DnoContext::with_defaults(&s.eta).unwrap();
    let b = pressure_solve(&s, &ctx).unwrap();
    assert!(b.a.min() > 0.0);
    let g2 = dot_fields(ctx.grad_eta(), ctx.grad_eta());
    let expect = b.a.zip_map(&g2, |a, g| a * (1.0 + g).sqrt());
    assert!(b.dpdn.sub(&expect).max_abs() < 1e-14);
}

#[test]
fn small_wave_taylor_deviation_is_quadratic() {
    let grid = Grid::unit_1d(32).unwrap();
    let ctx = DnoContext::with_defaults(&RealField::zeros(grid)).unwrap();
    let dev = |eps: f64| {
        let s = SurfaceState::new(0.0, RealField::zeros(grid), RealField::from_fn(grid, |x| eps * (3.0 * x[0]).cos()), 1.0)
            .unwrap();
        pressure_solve(&s, &ctx).unwrap().a.map(|a| a - 1.0).max_abs()
    };
    let order = fit::order(1e-2, dev(1e-2), 5e-3, dev(5e-3));
    assert!((order - 2.0).abs() < 0.05, "{order}");
    assert!(lp_norm(&RealField::zeros(grid), 2.0) == 0.0);
}
