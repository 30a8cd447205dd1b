use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zakharov_cli::{check, norms, parse_besov, run, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "zakharov", version, about = "Spectral water-wave simulator with a break-down monitor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write report.csv, meta.json and snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `scenario`, e.g. `steep_cosine(1, 0.35)`.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sample_stride: Option<usize>,
    },
    /// Run an acceptance suite (`all`, a criterion name or its number).
    Check {
        #[arg(long)]
        suite: String,
    },
    /// Besov norms of the fields in a snapshot.
    Norms {
        #[arg(long)]
        input: PathBuf,
        /// `s,p,q`; `p` and `q` accept `inf`.
        #[arg(long)]
        besov: String,
    },
}

fn load(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    RunConfig::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn execute(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Run { config, preset, out, sample_stride } => {
            let mut c = load(&config)?;
            if let Some(p) = preset {
                c.scenario = p.parse().map_err(|e| CliError::Config(format!("--preset: {e}")))?;
            }
            if let Some(o) = out {
                c.out = o;
            }
            if let Some(s) = sample_stride {
                c.sample_stride = s;
            }
            let summary = run(&c)?;
            match summary.blow_up_time {
                Some(t) => eprintln!("blow-up detected at t = {t}; partial report in {}", summary.out.display()),
                None => eprintln!(
                    "{:?} after {} steps at t = {}; report in {}",
                    summary.termination,
                    summary.steps,
                    summary.t_reached,
                    summary.out.display()
                ),
            }
            Ok(summary.exit_code())
        }
        Command::Check { suite } => {
            let (lines, ok) = check(&suite)?;
            for l in lines {
                println!("{l}");
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Norms { input, besov } => {
            let (s, p, q) = parse_besov(&besov)?;
            let (state, eta, psi) = norms(&input, s, p, q)?;
            println!("t = {}", state.t);
            println!("eta B^{s}_{{{p},{q}}} = {eta:e}");
            println!("psi B^{s}_{{{p},{q}}} = {psi:e}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
