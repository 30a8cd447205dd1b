//! Batch driver for the water-wave simulator: config files, runs with a
//! break-down report, snapshot norms and the acceptance suites.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod snapshot;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use thiserror::Error;

use zakharov_core::breakdown::{run_monitored, write_header, write_row, MonitorRun, Termination};
use zakharov_core::dynamics::{energy, Integrator, SurfaceState};
use zakharov_core::spectral::besov_norm;
use zakharov_core::suites;

pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("blow-up: {0}")]
    BlowUp(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::BlowUp(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<zakharov_core::Error> for CliError {
    fn from(e: zakharov_core::Error) -> Self {
        use zakharov_core::Error as E;
        let msg = e.to_string();
        match e {
            E::Io(_) => CliError::Io(msg),
            E::InvalidGrid(_) | E::InvalidParameter(_) | E::UnknownPreset(_) => CliError::Config(msg),
            E::BlowUp { .. } | E::SurfaceTooRough { .. } | E::TaylorSignViolated { .. } => CliError::BlowUp(msg),
            _ => CliError::Solver(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub const REPORT_FILE: &str = "report.csv";
pub const META_FILE: &str = "meta.json";
pub const INITIAL_SNAPSHOT: &str = "snapshot_initial.txt";
pub const FINAL_SNAPSHOT: &str = "snapshot_final.txt";

fn build_id() -> String {
    format!("{}+{}", env!("CARGO_PKG_VERSION"), option_env!("ZAKHAROV_BUILD_ID").unwrap_or("local"))
}

/// What a finished (or broken-down) run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out: PathBuf,
    pub termination: Termination,
    pub blow_up_time: Option<f64>,
    pub steps: usize,
    pub t_reached: f64,
    pub energy_drift: Option<f64>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.termination == Termination::BlowUpDetected {
            4
        } else {
            0
        }
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<(), CliError>) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn relative_drift(h0: f64, h1: f64) -> f64 {
    if h0 == 0.0 {
        (h1 - h0).abs()
    } else {
        (h1 - h0).abs() / h0.abs()
    }
}

/// Runs the configured scenario, streaming the report row by row so that a
/// run that breaks down still leaves a well-formed partial report.
pub fn run(config: &RunConfig) -> Result<RunSummary, CliError> {
    config.validate()?;
    let started = Instant::now();
    let out = config.out.clone();
    fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let grid = config.grid();
    let state = config.scenario.state(grid, config.g)?;
    write_file(&out.join(INITIAL_SNAPSHOT), |w| snapshot::write_snapshot(w, &state))?;

    let integ = Integrator::new(config.discretization()?, config.integrator_config())?;
    let h0 = energy(&state, &integ.context(&state.eta)?)?;

    let report_path = out.join(REPORT_FILE);
    let mut report = File::create(&report_path).map_err(|e| CliError::Io(format!("{}: {e}", report_path.display())))?;
    write_header(&mut report)?;
    let run = MonitorRun {
        t_final: config.t_final,
        params: config.monitor_params(),
        stride: config.sample_stride,
        resolution_tol: config.resolution_tol,
    };
    // Every row goes out in a single write, so an interrupted run never
    // leaves a torn line.
    let result = run_monitored(&integ, state, run, |s| write_row(&mut report, s))?;
    report.sync_data()?;

    let last = &result.last_state;
    let blow_up_time = result.blow_up.as_ref().map(|e| match e {
        zakharov_core::Error::BlowUp { t } => *t,
        _ => last.t,
    });
    let h1 = integ.context(&last.eta).and_then(|ctx| energy(last, &ctx)).ok();
    let drift = h1.map(|h1| relative_drift(h0, h1));
    write_file(&out.join(FINAL_SNAPSHOT), |w| snapshot::write_snapshot(w, last))?;

    let r = &result.report;
    let meta = json!({
        "build_id": build_id(),
        "config": config.serialize(),
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
        "termination": r.termination,
        "blow_up_time": blow_up_time,
        "blow_up_cause": result.blow_up.as_ref().map(|e| e.to_string()),
        "steps": result.steps,
        "t_reached": last.t,
        "samples": r.samples.len(),
        "m_t": r.m_t(),
        "kappa_sup": r.kappa_sup,
        "trace_integral": r.trace_integral,
        "ts_min": r.ts_min,
        "energy_initial": h0,
        "energy_final": h1,
        "energy_drift": drift,
        "energy_within_tol": drift.map(|d| d <= config.tol_e),
        "columns": zakharov_core::breakdown::COLUMNS,
    });
    write_file(&out.join(META_FILE), |w| {
        serde_json::to_writer_pretty(&mut *w, &meta).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    })?;

    Ok(RunSummary {
        out,
        termination: r.termination,
        blow_up_time,
        steps: result.steps,
        t_reached: last.t,
        energy_drift: drift,
    })
}

/// Parses `s,p,q`; `p` and `q` accept `inf`.
pub fn parse_besov(spec: &str) -> Result<(f64, f64, f64), CliError> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let err = || CliError::Config(format!("expected s,p,q with p, q in [1, inf], got {spec:?}"));
    if parts.len() != 3 {
        return Err(err());
    }
    let v: Vec<f64> = parts.iter().map(|p| p.parse::<f64>()).collect::<Result<_, _>>().map_err(|_| err())?;
    if !v[0].is_finite() || !(v[1] >= 1.0) || !(v[2] >= 1.0) {
        return Err(err());
    }
    Ok((v[0], v[1], v[2]))
}

/// Besov norms of `η` and `ψ` in a saved snapshot.
pub fn norms(path: &Path, s: f64, p: f64, q: f64) -> Result<(SurfaceState, f64, f64), CliError> {
    let f = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let state = snapshot::read_snapshot(BufReader::new(f))?;
    let eta = besov_norm(&state.eta, s, p, q)?;
    let psi = besov_norm(&state.psi, s, p, q)?;
    Ok((state, eta, psi))
}

/// Runs a named suite, returning the printed lines and whether all passed.
pub fn check(suite: &str) -> Result<(Vec<String>, bool), CliError> {
    let criteria = suites::suite(suite).map_err(|e| CliError::Config(e.to_string()))?;
    let mut lines = Vec::new();
    let mut ok = true;
    for c in criteria {
        match c.run() {
            Ok(outcome) => {
                ok &= outcome.passed();
                lines.push(outcome.to_string());
            }
            Err(e) => {
                ok = false;
                lines.push(format!("FAIL [{:>2}] {}: {e}", c.id(), c.name()));
            }
        }
    }
    Ok((lines, ok))
}
