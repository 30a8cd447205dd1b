//! Zakharov time integration, conserved energy and the pressure solves.

mod pressure;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dno::{DnoContext, DEFAULT_DELTA_HINT};
use crate::error::{Error, Result};
use crate::spectral::{dot_fields, Grid, RealField};
use crate::strip::StripDiscretization;

pub use pressure::{material_pressure_rate, pressure_solve, MaterialRate, PressureBundle, SourceAssembly};

/// Surface elevation and velocity potential at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceState {
    pub t: f64,
    pub eta: RealField,
    pub psi: RealField,
    pub g: f64,
}

impl SurfaceState {
    pub fn new(t: f64, eta: RealField, psi: RealField, g: f64) -> Result<Self> {
        eta.ensure_same_grid(&psi)?;
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidParameter(format!("gravity must be positive, got {g}")));
        }
        if !(t.is_finite() && eta.is_finite() && psi.is_finite()) {
            return Err(Error::InvalidParameter("state is not finite".into()));
        }
        Ok(Self { t, eta, psi, g })
    }

    pub fn rest(grid: Grid, g: f64) -> Self {
        Self { t: 0.0, eta: RealField::zeros(grid), psi: RealField::zeros(grid), g }
    }

    pub fn grid(&self) -> &Grid {
        self.eta.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.eta.is_finite() && self.psi.is_finite()
    }

    fn advanced(&self, dt: f64, k: &Rhs) -> Self {
        Self {
            t: self.t + dt,
            eta: self.eta.axpy(dt, &k.deta),
            psi: self.psi.axpy(dt, &k.dpsi),
            g: self.g,
        }
    }
}

/// Time derivatives of `(η, ψ)`.
#[derive(Debug, Clone)]
pub struct Rhs {
    pub deta: RealField,
    pub dpsi: RealField,
}

/// Right-hand side of the Zakharov system, computed with a context built
/// from `state.eta`.
pub fn rhs(state: &SurfaceState, ctx: &DnoContext, dealias: bool) -> Result<Rhs> {
    let g_psi = ctx.dn_apply(&state.psi)?;
    Ok(rhs_from(state, ctx, &g_psi, dealias))
}

fn rhs_from(state: &SurfaceState, ctx: &DnoContext, g_psi: &RealField, dealias: bool) -> Rhs {
    let grad_psi = state.psi.gradient();
    let grad_eta = ctx.grad_eta();
    let kinetic = dot_fields(&grad_psi, &grad_psi);
    let g2 = dot_fields(grad_eta, grad_eta);
    let num = g_psi.add(&dot_fields(grad_eta, &grad_psi));
    let dpsi = state.eta.scale(-state.g).axpy(-0.5, &kinetic).add(
        &num.zip_map(&g2, |n, g| n * n / (2.0 * (1.0 + g))),
    );
    if dealias {
        Rhs { deta: g_psi.dealias(), dpsi: dpsi.dealias() }
    } else {
        Rhs { deta: g_psi.clone(), dpsi }
    }
}

/// `exp(−strength·(|m|/m_cut)^order)` applied per axis mode, `m_cut = n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFilter {
    pub strength: f64,
    pub order: i32,
}

impl Default for ExponentialFilter {
    fn default() -> Self {
        Self { strength: 36.0, order: 36 }
    }
}

impl ExponentialFilter {
    pub fn apply(&self, u: &RealField) -> RealField {
        let grid = *u.grid();
        let k_cut = grid.k_nyquist();
        u.filter(|xi| {
            let r = (xi[0].abs().max(xi[1].abs()) / k_cut).min(1.0);
            (-self.strength * r.powi(self.order)).exp()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub dealias: bool,
    pub filter: Option<ExponentialFilter>,
    pub delta_hint: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: 1e-3, dealias: true, filter: None, delta_hint: DEFAULT_DELTA_HINT }
    }
}

/// Classical RK4 over the Zakharov right-hand side. The strip
/// discretization is shared; the surface-dependent context is rebuilt at
/// every substage.
#[derive(Debug, Clone)]
pub struct Integrator {
    disc: Arc<StripDiscretization>,
    config: IntegratorConfig,
}

impl Integrator {
    pub fn new(disc: Arc<StripDiscretization>, config: IntegratorConfig) -> Result<Self> {
        if !(config.dt.is_finite() && config.dt != 0.0) {
            return Err(Error::InvalidParameter(format!("time step must be finite and nonzero, got {}", config.dt)));
        }
        Ok(Self { disc, config })
    }

    pub fn with_defaults(grid: Grid, dt: f64) -> Result<Self> {
        let disc = Arc::new(StripDiscretization::with_defaults(grid)?);
        Self::new(disc, IntegratorConfig { dt, ..IntegratorConfig::default() })
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.config
    }

    pub fn discretization(&self) -> &Arc<StripDiscretization> {
        &self.disc
    }

    pub fn context(&self, eta: &RealField) -> Result<DnoContext> {
        DnoContext::new(self.disc.clone(), eta, self.config.delta_hint)
    }

    pub fn rhs(&self, state: &SurfaceState) -> Result<Rhs> {
        let ctx = self.context(&state.eta)?;
        rhs(state, &ctx, self.config.dealias)
    }

    fn clean(&self, mut s: SurfaceState) -> SurfaceState {
        if self.config.dealias {
            s.eta = s.eta.dealias();
            s.psi = s.psi.dealias();
        }
        s
    }

    fn stage(&self, state: &SurfaceState, t_fail: f64) -> Result<Rhs> {
        if !state.is_finite() {
            return Err(Error::BlowUp { t: t_fail });
        }
        let k = self.rhs(state).map_err(|e| match e {
            Error::SurfaceTooRough { .. } | Error::DegenerateSymbol { .. } => Error::BlowUp { t: t_fail },
            other => other,
        })?;
        if !(k.deta.is_finite() && k.dpsi.is_finite()) {
            return Err(Error::BlowUp { t: t_fail });
        }
        Ok(k)
    }

    /// One RK4 step of size `config.dt`.
    pub fn step(&self, state: &SurfaceState) -> Result<SurfaceState> {
        self.step_by(state, self.config.dt)
    }

    pub fn step_by(&self, state: &SurfaceState, dt: f64) -> Result<SurfaceState> {
        let t = state.t;
        let k1 = self.stage(state, t)?;
        let s2 = self.clean(state.advanced(0.5 * dt, &k1));
        let k2 = self.stage(&s2, t + 0.5 * dt)?;
        let s3 = self.clean(state.advanced(0.5 * dt, &k2));
        let k3 = self.stage(&s3, t + 0.5 * dt)?;
        let s4 = self.clean(state.advanced(dt, &k3));
        let k4 = self.stage(&s4, t + dt)?;
        let combine = |a: &RealField, b: &RealField, c: &RealField, d: &RealField| {
            a.add(&b.scale(2.0)).add(&c.scale(2.0)).add(d).scale(dt / 6.0)
        };
        let mut next = SurfaceState {
            t: t + dt,
            eta: state.eta.add(&combine(&k1.deta, &k2.deta, &k3.deta, &k4.deta)),
            psi: state.psi.add(&combine(&k1.dpsi, &k2.dpsi, &k3.dpsi, &k4.dpsi)),
            g: state.g,
        };
        next = self.clean(next);
        if let Some(f) = self.config.filter {
            next.eta = f.apply(&next.eta);
            next.psi = f.apply(&next.psi);
        }
        if !next.is_finite() {
            return Err(Error::BlowUp { t: t + dt });
        }
        Ok(next)
    }

    /// Advances by whole steps until `t_end` (the last step is shortened).
    pub fn advance(&self, state: &SurfaceState, t_end: f64) -> Result<SurfaceState> {
        let mut s = state.clone();
        let dt = self.config.dt;
        let dir = dt.signum();
        while (t_end - s.t) * dir > 1e-12 * dt.abs() {
            let h = if (t_end - s.t) * dir < dt.abs() { t_end - s.t } else { dt };
            s = self.step_by(&s, h)?;
        }
        Ok(s)
    }

    /// Advisory step bound `2.8 / (√(g ξ_max) + ξ_max‖∇ψ‖_∞)`; RK4's
    /// stability interval on the imaginary axis is `2√2`.
    pub fn cfl_limit(state: &SurfaceState) -> f64 {
        let xi = state.grid().xi_max();
        let u = state.psi.gradient().iter().map(|g| g.max_abs()).fold(0.0, f64::max);
        2.8 / ((state.g * xi).sqrt() + xi * u)
    }
}

/// `H = ∫ gη² + ψG(η)ψ`.
pub fn energy(state: &SurfaceState, ctx: &DnoContext) -> Result<f64> {
    let g_psi = ctx.dn_apply(&state.psi)?;
    Ok(energy_from(state, &g_psi))
}

pub(crate) fn energy_from(state: &SurfaceState, g_psi: &RealField) -> f64 {
    state.g * state.eta.inner(&state.eta) + state.psi.inner(g_psi)
}

/// `E₀ = ⟨G(η)ψ, ψ⟩^{1/2}`.
pub fn e0(state: &SurfaceState, ctx: &DnoContext) -> Result<f64> {
    let g_psi = ctx.dn_apply(&state.psi)?;
    Ok(state.psi.inner(&g_psi).max(0.0).sqrt())
}

/// Fraction of the `L²` norm carried by modes with `|m| > n/4` on some axis.
pub fn spectral_tail(u: &RealField) -> f64 {
    let grid = *u.grid();
    let cut = (grid.n() / 4) as i64;
    let s = u.spectrum();
    let mut tail = 0.0;
    let mut total = 0.0;
    for (i, c) in s.coeffs().iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        let [a, b] = grid.modes(i);
        if a.abs() > cut || b.abs() > cut {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (tail / total).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rest_state_has_zero_rhs_and_energy() {
        let g = Grid::unit_1d(16).unwrap();
        let s = SurfaceState::rest(g, 1.0);
        let integ = Integrator::with_defaults(g, 0.01).unwrap();
        let k = integ.rhs(&s).unwrap();
        assert_eq!(k.deta.max_abs(), 0.0);
        assert_eq!(k.dpsi.max_abs(), 0.0);
        let next = integ.step(&s).unwrap();
        assert_eq!(next.eta.max_abs(), 0.0);
        let ctx = integ.context(&s.eta).unwrap();
        assert_eq!(energy(&s, &ctx).unwrap(), 0.0);
        assert_eq!(e0(&s, &ctx).unwrap(), 0.0);
    }

    #[test]
    fn flat_energy_matches_parseval() {
        let g = Grid::unit_1d(32).unwrap();
        let psi = RealField::from_fn(g, |x| (2.0 * x[0]).cos());
        let s = SurfaceState::new(0.0, RealField::zeros(g), psi, 1.0).unwrap();
        let ctx = DnoContext::with_defaults(&s.eta).unwrap();
        assert!((energy(&s, &ctx).unwrap() - 2.0 * PI).abs() < 1e-11);
        assert!((e0(&s, &ctx).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn flat_linear_rhs() {
        let g = Grid::unit_1d(32).unwrap();
        let eps = 1e-3;
        let psi = RealField::from_fn(g, |x| eps * (3.0 * x[0]).cos());
        let s = SurfaceState::new(0.0, RealField::zeros(g), psi.clone(), 1.0).unwrap();
        let ctx = DnoContext::with_defaults(&s.eta).unwrap();
        let k = rhs(&s, &ctx, true).unwrap();
        assert!(k.deta.sub(&psi.scale(3.0)).max_abs() < 1e-14);
        // −½|∇ψ|² + ½(Gψ)² = ½(9ε²)(cos² − sin²) = O(ε²).
        assert!(k.dpsi.max_abs() < 5.0 * eps * eps);
    }

    #[test]
    fn quadratic_terms_match_trace_identity() {
        let g = Grid::unit_1d(32).unwrap();
        let eta = RealField::from_fn(g, |x| 0.1 * x[0].cos());
        let psi = RealField::from_fn(g, |x| 0.2 * (x[0] + 0.3).sin() + 0.05 * (2.0 * x[0]).cos());
        let s = SurfaceState::new(0.0, eta.clone(), psi.clone(), 1.0).unwrap();
        let ctx = DnoContext::with_defaults(&eta).unwrap();
        let k = rhs(&s, &ctx, false).unwrap();
        let t = ctx.traces(&psi).unwrap();
        // |∇ψ|² − (Gψ + ∇η·∇ψ)²/(1+|∇η|²) = V·∇ψ − B·Gψ
        let quad = k.dpsi.add(&eta.scale(s.g)).scale(-2.0);
        let ident = dot_fields(&t.v, &psi.gradient()).sub(&t.b.mul(&t.g_psi));
        assert!(quad.sub(&ident).max_abs() < 1e-13);
    }

    #[test]
    fn spectral_tail_of_low_mode_is_zero() {
        let g = Grid::unit_1d(32).unwrap();
        assert!(spectral_tail(&RealField::from_fn(g, |x| x[0].cos())) < 1e-15);
        assert!(spectral_tail(&RealField::from_fn(g, |x| (12.0 * x[0]).cos())) > 0.99);
    }
}
