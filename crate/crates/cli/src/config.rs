//! `key=value` run configuration.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use zakharov_core::breakdown::MonitorParams;
use zakharov_core::dynamics::{ExponentialFilter, IntegratorConfig};
use zakharov_core::presets::Preset;
use zakharov_core::strip::{SolverSettings, StripDiscretization, VerticalGrid};
use zakharov_core::Grid;

use crate::CliError;

/// Every key accepted in a config file, in serialization order.
pub const KEYS: [&str; 19] = [
    "d",
    "n",
    "L",
    "g",
    "dt",
    "T",
    "Z_b",
    "M",
    "delta_hint",
    "p",
    "s",
    "scenario",
    "out",
    "tol_E",
    "solver_tol",
    "dealias",
    "filter",
    "sample_stride",
    "resolution_tol",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub d: usize,
    pub n: usize,
    pub length: f64,
    pub g: f64,
    pub dt: f64,
    pub t_final: f64,
    /// Strip depth; `None` means `10/k_min`.
    pub z_b: Option<f64>,
    pub m: usize,
    pub delta_hint: f64,
    /// `None` means the monitor default `2d + 1`.
    pub p: Option<f64>,
    /// `None` means the monitor default for `d`.
    pub s: Option<f64>,
    pub scenario: Preset,
    pub out: PathBuf,
    pub tol_e: f64,
    pub solver_tol: f64,
    pub dealias: bool,
    pub filter: bool,
    pub sample_stride: usize,
    pub resolution_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            d: 1,
            n: 256,
            length: 2.0 * PI,
            g: 1.0,
            dt: 1e-3,
            t_final: 1.0,
            z_b: None,
            m: 64,
            delta_hint: 1.0,
            p: None,
            s: None,
            scenario: Preset::Rest,
            out: PathBuf::from("out"),
            tol_e: 1e-8,
            solver_tol: 1e-13,
            dealias: true,
            filter: false,
            sample_stride: 1,
            resolution_tol: 1e-4,
        }
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Config(format!("line {line}: {}", msg.into()))
}

fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| syntax(line, format!("cannot parse {key} = {v:?}")))
}

fn flag(line: usize, key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(syntax(line, format!("{key} must be true or false, got {v:?}"))),
    }
}

impl RunConfig {
    /// Parses `key=value` lines; `#` starts a comment. Missing keys take
    /// their defaults, unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut c = Self::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| syntax(line, format!("expected key=value, got {body:?}")))?;
            let (key, v) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(syntax(line, format!("unknown key {key:?}")));
            }
            if seen.contains(&key) {
                return Err(syntax(line, format!("duplicate key {key:?}")));
            }
            seen.push(key);
            match key {
                "d" => c.d = num(line, key, v)?,
                "n" => c.n = num(line, key, v)?,
                "L" => c.length = num(line, key, v)?,
                "g" => c.g = num(line, key, v)?,
                "dt" => c.dt = num(line, key, v)?,
                "T" => c.t_final = num(line, key, v)?,
                "Z_b" => c.z_b = Some(num(line, key, v)?),
                "M" => c.m = num(line, key, v)?,
                "delta_hint" => c.delta_hint = num(line, key, v)?,
                "p" => c.p = Some(num(line, key, v)?),
                "s" => c.s = Some(num(line, key, v)?),
                "scenario" => c.scenario = v.parse().map_err(|e| syntax(line, format!("{e}")))?,
                "out" => c.out = PathBuf::from(v),
                "tol_E" => c.tol_e = num(line, key, v)?,
                "solver_tol" => c.solver_tol = num(line, key, v)?,
                "dealias" => c.dealias = flag(line, key, v)?,
                "filter" => c.filter = flag(line, key, v)?,
                "sample_stride" => c.sample_stride = num(line, key, v)?,
                "resolution_tol" => c.resolution_tol = num(line, key, v)?,
                _ => unreachable!("key list and match arms agree"),
            }
        }
        c.validate()?;
        Ok(c)
    }

    /// Checks the cross-field invariants, naming the violated one.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.d != 1 && self.d != 2 {
            return bad(format!("d must be 1 or 2, got {}", self.d));
        }
        if let Err(e) = Grid::new(self.d, self.n, self.length) {
            return bad(e.to_string());
        }
        let positive = [
            ("g", self.g),
            ("dt", self.dt),
            ("T", self.t_final),
            ("delta_hint", self.delta_hint),
            ("tol_E", self.tol_e),
            ("solver_tol", self.solver_tol),
            ("resolution_tol", self.resolution_tol),
        ];
        for (k, v) in positive.into_iter().chain(self.z_b.map(|z| ("Z_b", z))) {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{k} must be positive and finite, got {v}"));
            }
        }
        if self.m < 4 {
            return bad(format!("M must be at least 4, got {}", self.m));
        }
        if self.sample_stride == 0 {
            return bad("sample_stride must be at least 1".into());
        }
        let (p, s) = (self.monitor_p(), self.monitor_s());
        let dim = self.d as f64;
        if !(p > 2.0 * dim) {
            return bad(format!("p must satisfy p > 2d = {}, got {p}", 2 * self.d));
        }
        if !(s > 1.0 + dim / 2.0) {
            return bad(format!("s must satisfy s > 1 + d/2 = {}, got {s}", 1.0 + dim / 2.0));
        }
        Ok(())
    }

    fn monitor_p(&self) -> f64 {
        self.p.unwrap_or(MonitorParams::defaults(self.d).p)
    }

    fn monitor_s(&self) -> f64 {
        self.s.unwrap_or(MonitorParams::defaults(self.d).s)
    }

    /// Writes every key; the output parses back to an equal config.
    pub fn serialize(&self) -> String {
        let mut o = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(o, "{k}={v}");
        };
        put("d", self.d.to_string());
        put("n", self.n.to_string());
        put("L", self.length.to_string());
        put("g", self.g.to_string());
        put("dt", self.dt.to_string());
        put("T", self.t_final.to_string());
        if let Some(z) = self.z_b {
            put("Z_b", z.to_string());
        }
        put("M", self.m.to_string());
        put("delta_hint", self.delta_hint.to_string());
        if let Some(p) = self.p {
            put("p", p.to_string());
        }
        if let Some(s) = self.s {
            put("s", s.to_string());
        }
        put("scenario", self.scenario.to_string());
        put("out", self.out.display().to_string());
        put("tol_E", self.tol_e.to_string());
        put("solver_tol", self.solver_tol.to_string());
        put("dealias", self.dealias.to_string());
        put("filter", self.filter.to_string());
        put("sample_stride", self.sample_stride.to_string());
        put("resolution_tol", self.resolution_tol.to_string());
        o
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.d, self.n, self.length).expect("validated")
    }

    pub fn monitor_params(&self) -> MonitorParams {
        MonitorParams::new(self.d, self.monitor_p(), self.monitor_s()).expect("validated")
    }

    pub fn depth(&self) -> f64 {
        self.z_b.unwrap_or(10.0 / self.grid().k_min())
    }

    pub fn discretization(&self) -> Result<Arc<StripDiscretization>, CliError> {
        let grid = self.grid();
        let vertical = VerticalGrid::stretched(self.depth(), self.m, 8.0 / grid.xi_max())?;
        Ok(Arc::new(StripDiscretization::new(grid, Arc::new(vertical), SolverSettings::with_tol(self.solver_tol))?))
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        IntegratorConfig {
            dt: self.dt,
            dealias: self.dealias,
            filter: self.filter.then(ExponentialFilter::default),
            delta_hint: self.delta_hint,
        }
    }
}
