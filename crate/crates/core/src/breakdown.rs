//! Break-down monitor: curvature norms, trace-velocity gradients, the Taylor
//! sign, Sobolev energies and the good unknowns, accumulated along a run.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dno::DnoContext;
use crate::dynamics::{pressure_solve, spectral_tail, Integrator, PressureBundle, SurfaceState};
use crate::error::{Error, Result};
use crate::paradiff::{paradiff_apply, paraproduct, Symbol};
use crate::spectral::{divergence, dot_fields, fourier_multiplier, lp_norm, sobolev_norm, Grid, RealField};

/// `κ = ∇·(∇η/√(1+|∇η|²))`, dealiased.
pub fn curvature(eta: &RealField) -> RealField {
    let grad = eta.gradient();
    let w = dot_fields(&grad, &grad).map(|g| 1.0 / (1.0 + g).sqrt());
    let unit: Vec<RealField> = grad.iter().map(|g| g.mul(&w)).collect();
    divergence(&unit).dealias()
}

/// Exponents used by the monitor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorParams {
    pub p: f64,
    pub s: f64,
}

impl MonitorParams {
    pub fn new(dim: usize, p: f64, s: f64) -> Result<Self> {
        let d = dim as f64;
        if !(p > 2.0 * d) {
            return Err(Error::InvalidParameter(format!("p must satisfy p > 2d = {}, got {p}", 2 * dim)));
        }
        if !(s > 1.0 + d / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "s must satisfy s > 1 + d/2 = {}, got {s}",
                1.0 + d / 2.0
            )));
        }
        Ok(Self { p, s })
    }

    /// `p = 2d + 1`, `s = 2.5` in 1D and `2.25` in 2D.
    pub fn defaults(dim: usize) -> Self {
        Self { p: (2 * dim + 1) as f64, s: if dim == 1 { 2.5 } else { 2.25 } }
    }
}

pub const COLUMNS: [&str; 10] = [
    "t",
    "kappa_lp",
    "kappa_l2",
    "grad_trace_sup",
    "ts_inf",
    "es",
    "e0",
    "u_s_l2",
    "theta_s_l2",
    "m_t_running",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorSample {
    pub t: f64,
    pub kappa_lp: f64,
    pub kappa_l2: f64,
    /// `max ‖(∇V, ∇B)‖_∞` over components.
    pub grad_trace_sup: f64,
    /// `min −∂P/∂n` over the surface.
    pub ts_inf: f64,
    pub es: f64,
    pub e0: f64,
    pub u_s_l2: f64,
    pub theta_s_l2: f64,
    /// `M(t)` after this sample was accumulated; zero until then.
    pub m_t_running: f64,
}

impl MonitorSample {
    fn values(&self) -> [f64; 10] {
        [
            self.t,
            self.kappa_lp,
            self.kappa_l2,
            self.grad_trace_sup,
            self.ts_inf,
            self.es,
            self.e0,
            self.u_s_l2,
            self.theta_s_l2,
            self.m_t_running,
        ]
    }

    fn from_values(v: [f64; 10]) -> Self {
        Self {
            t: v[0],
            kappa_lp: v[1],
            kappa_l2: v[2],
            grad_trace_sup: v[3],
            ts_inf: v[4],
            es: v[5],
            e0: v[6],
            u_s_l2: v[7],
            theta_s_l2: v[8],
            m_t_running: v[9],
        }
    }

    pub fn kappa_norm(&self) -> f64 {
        self.kappa_lp + self.kappa_l2
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

fn bessel(u: &RealField, s: f64) -> RealField {
    fourier_multiplier(u, |xi| Complex64::new((1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(0.5 * s), 0.0))
        .expect("finite multiplier")
}

fn l2_vec(fields: &[RealField]) -> f64 {
    fields.iter().map(|f| lp_norm(f, 2.0).powi(2)).sum::<f64>().sqrt()
}

/// `q(x, ξ) = √(a(x)/λ(x, ξ))` on the principal branch, zero for `|ξ| < 1/2`.
pub struct Symmetrizer<'a> {
    a: &'a RealField,
    lambda: &'a dyn Symbol,
}

impl<'a> Symmetrizer<'a> {
    /// Requires `a > 0` everywhere and `Re λ > 0` for `|ξ| ≥ 1/2`.
    pub fn new(a: &'a RealField, lambda: &'a dyn Symbol) -> Result<Self> {
        let node = a.argmin();
        let min_a = a.values()[node];
        if !(min_a > 0.0) {
            return Err(Error::TaylorSignViolated { min_a, node });
        }
        let grid = *a.grid();
        let mut col = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (m, xi) in grid.wavevectors().into_iter().enumerate() {
            if xi[0].hypot(xi[1]) < 0.5 {
                continue;
            }
            lambda.column(m, &mut col);
            if let Some((node, l)) = col.iter().enumerate().find(|(_, l)| !(l.re > 0.0)) {
                return Err(Error::DegenerateSymbol { node, xi, radicand: l.re });
            }
        }
        Ok(Self { a, lambda })
    }
}

impl Symbol for Symmetrizer<'_> {
    fn grid(&self) -> &Grid {
        self.a.grid()
    }

    fn order(&self) -> f64 {
        -0.5
    }

    fn column(&self, xi_idx: usize, out: &mut [Complex64]) {
        let xi = self.grid().wavevector(xi_idx);
        if xi[0].hypot(xi[1]) < 0.5 {
            out.fill(Complex64::new(0.0, 0.0));
            return;
        }
        self.lambda.column(xi_idx, out);
        for (o, a) in out.iter_mut().zip(self.a.values()) {
            *o = (Complex64::new(*a, 0.0) / *o).sqrt();
        }
    }
}

#[derive(Debug, Clone)]
pub struct GoodUnknowns {
    pub u_s: Vec<RealField>,
    pub zeta_s: Vec<RealField>,
    pub theta_s: Vec<RealField>,
}

/// `U_s = ⟨D⟩^sV + T_ζ⟨D⟩^sB`, `ζ_s = ⟨D⟩^sζ`, `θ_s = T_q ζ_s` with `ζ = ∇η`.
pub fn good_unknowns(ctx: &DnoContext, bundle: &PressureBundle, s: f64) -> Result<GoodUnknowns> {
    let t = &bundle.traces;
    let bs = bessel(&t.b, s);
    let zeta = ctx.grad_eta();
    let mut u_s = Vec::with_capacity(zeta.len());
    for (v, z) in t.v.iter().zip(zeta) {
        u_s.push(bessel(v, s).add(&paraproduct(z, &bs)?));
    }
    let zeta_s: Vec<RealField> = zeta.iter().map(|z| bessel(z, s)).collect();
    let lambda = ctx.dn_symbol();
    let q = Symmetrizer::new(&bundle.a, &lambda)?;
    let theta_s = zeta_s.iter().map(|z| paradiff_apply(&q, z)).collect::<Result<_>>()?;
    Ok(GoodUnknowns { u_s, zeta_s, theta_s })
}

/// Evaluates every monitored quantity at the state's time level.
pub fn monitor_sample(
    state: &SurfaceState,
    ctx: &DnoContext,
    bundle: &PressureBundle,
    params: MonitorParams,
) -> Result<MonitorSample> {
    if !state.is_finite() {
        return Err(Error::BlowUp { t: state.t });
    }
    let kappa = curvature(&state.eta);
    let t = &bundle.traces;
    let mut grad_trace_sup: f64 = 0.0;
    for f in t.v.iter().chain(std::iter::once(&t.b)) {
        for g in f.gradient() {
            grad_trace_sup = grad_trace_sup.max(g.max_abs());
        }
    }
    let s = params.s;
    let hs = |f: &RealField, s: f64| sobolev_norm(f, s).powi(2);
    let top = (hs(&state.eta, s + 0.5) + hs(&state.psi, s + 0.5)).sqrt();
    let traces = (t.v.iter().map(|v| hs(v, s)).sum::<f64>() + hs(&t.b, s)).sqrt();
    let good = good_unknowns(ctx, bundle, s)?;
    let sample = MonitorSample {
        t: state.t,
        kappa_lp: lp_norm(&kappa, params.p),
        kappa_l2: lp_norm(&kappa, 2.0),
        grad_trace_sup,
        ts_inf: bundle.dpdn.min(),
        es: top + traces,
        e0: state.psi.inner(&t.g_psi).max(0.0).sqrt(),
        u_s_l2: l2_vec(&good.u_s),
        theta_s_l2: l2_vec(&good.theta_s),
        m_t_running: 0.0,
    };
    if !sample.is_finite() {
        return Err(Error::BlowUp { t: state.t });
    }
    Ok(sample)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Normal,
    BlowUpDetected,
    ResolutionExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownReport {
    pub samples: Vec<MonitorSample>,
    pub params: MonitorParams,
    pub termination: Termination,
    /// Running sup of `‖κ‖_{L^p} + ‖κ‖_{L²}`.
    pub kappa_sup: f64,
    /// Trapezoidal `∫‖(∇V, ∇B)‖⁶_∞ dt`.
    pub trace_integral: f64,
    /// Running min of `ts_inf`.
    pub ts_min: f64,
}

impl BreakdownReport {
    pub fn new(params: MonitorParams) -> Self {
        Self {
            samples: Vec::new(),
            params,
            termination: Termination::Normal,
            kappa_sup: 0.0,
            trace_integral: 0.0,
            ts_min: f64::INFINITY,
        }
    }

    pub fn m_t(&self) -> f64 {
        self.kappa_sup + self.trace_integral
    }

    /// Appends a sample, updating the accumulators; returns the stored copy.
    pub fn accumulate(&mut self, mut sample: MonitorSample) -> Result<MonitorSample> {
        if let Some(last) = self.samples.last() {
            if sample.t < last.t {
                return Err(Error::TimeRegression { t: sample.t, last: last.t });
            }
            let dt = sample.t - last.t;
            self.trace_integral += 0.5 * dt * (last.grad_trace_sup.powi(6) + sample.grad_trace_sup.powi(6));
        }
        self.kappa_sup = self.kappa_sup.max(sample.kappa_norm());
        self.ts_min = self.ts_min.min(sample.ts_inf);
        sample.m_t_running = self.m_t();
        self.samples.push(sample);
        Ok(sample)
    }

    pub fn emit(&self, sink: &mut impl Write) -> Result<()> {
        write_header(sink)?;
        for s in &self.samples {
            write_row(sink, s)?;
        }
        Ok(())
    }

    /// Parses the CSV written by [`BreakdownReport::emit`] back into samples.
    pub fn read_samples(source: impl BufRead) -> Result<Vec<MonitorSample>> {
        let mut lines = source.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header != COLUMNS.join(",") {
            return Err(Error::Io(format!("unexpected report header: {header}")));
        }
        let mut out = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Io(format!("row {}: {e}", i + 2)))?;
            let arr: [f64; 10] =
                vals.try_into().map_err(|_| Error::Io(format!("row {}: expected 10 columns", i + 2)))?;
            out.push(MonitorSample::from_values(arr));
        }
        Ok(out)
    }
}

pub fn write_header(sink: &mut impl Write) -> Result<()> {
    sink.write_all(format!("{}\n", COLUMNS.join(",")).as_bytes())?;
    Ok(())
}

/// One complete line per call, so an interrupted run leaves no torn rows.
pub fn write_row(sink: &mut impl Write, s: &MonitorSample) -> Result<()> {
    let cells: Vec<String> = s.values().iter().map(|v| format!("{v:e}")).collect();
    sink.write_all(format!("{}\n", cells.join(",")).as_bytes())?;
    Ok(())
}

/// Settings for a monitored run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorRun {
    pub t_final: f64,
    pub params: MonitorParams,
    /// Sample every `stride` accepted steps (and at the end).
    pub stride: usize,
    /// Stop once the spectral tail of `η` or `ψ` exceeds this fraction.
    pub resolution_tol: f64,
}

/// Outcome of [`run_monitored`].
#[derive(Debug, Clone)]
pub struct MonitoredRun {
    pub report: BreakdownReport,
    pub last_state: SurfaceState,
    pub steps: usize,
    pub blow_up: Option<Error>,
}

fn sample_state(integ: &Integrator, state: &SurfaceState, params: MonitorParams) -> Result<MonitorSample> {
    let ctx = integ.context(&state.eta)?;
    let bundle = pressure_solve(state, &ctx)?;
    monitor_sample(state, &ctx, &bundle, params)
}

fn is_breakdown(e: &Error) -> bool {
    matches!(
        e,
        Error::BlowUp { .. }
            | Error::SurfaceTooRough { .. }
            | Error::DegenerateSymbol { .. }
            | Error::TaylorSignViolated { .. }
    )
}

/// Advances `state` to `run.t_final`, sampling the monitor along the way and
/// calling `on_sample` for every accumulated sample. Break-down signals end
/// the run with a partial report, and so does a solver failure inside a time
/// step; other errors propagate.
pub fn run_monitored(
    integ: &Integrator,
    state: SurfaceState,
    run: MonitorRun,
    mut on_sample: impl FnMut(&MonitorSample) -> Result<()>,
) -> Result<MonitoredRun> {
    let mut report = BreakdownReport::new(run.params);
    let stride = run.stride.max(1);
    let dt = integ.config().dt.abs();
    let mut state = state;
    let mut steps = 0;
    let mut record = |report: &mut BreakdownReport, s: &SurfaceState| -> Result<()> {
        let sample = report.accumulate(sample_state(integ, s, run.params)?)?;
        on_sample(&sample)
    };
    let mut blow_up = None;
    let mut outcome = record(&mut report, &state);
    while outcome.is_ok() && run.t_final - state.t > 1e-12 * dt {
        let h = dt.min(run.t_final - state.t);
        match integ.step_by(&state, h) {
            Ok(next) => state = next,
            // The initial sample already solved on this grid; a stage state the
            // strip solver cannot handle means the step left the resolved regime.
            Err(Error::IllConditioned { .. }) => {
                outcome = Err(Error::BlowUp { t: state.t });
                break;
            }
            Err(e) => {
                outcome = Err(e);
                break;
            }
        }
        steps += 1;
        let resolved = spectral_tail(&state.eta).max(spectral_tail(&state.psi)) <= run.resolution_tol;
        let done = run.t_final - state.t <= 1e-12 * dt;
        if steps % stride == 0 || done || !resolved {
            outcome = record(&mut report, &state);
        }
        if !resolved {
            report.termination = Termination::ResolutionExhausted;
            break;
        }
    }
    if let Err(e) = outcome {
        if is_breakdown(&e) {
            report.termination = Termination::BlowUpDetected;
            blow_up = Some(match e {
                Error::BlowUp { .. } => e,
                _ => Error::BlowUp { t: state.t },
            });
        } else {
            return Err(e);
        }
    }
    Ok(MonitoredRun { report, last_state: state, steps, blow_up })
}
