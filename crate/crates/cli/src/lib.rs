//! Batch runner: `lp-tile-lab <experiment> [--config FILE] [--seed U64] [--out DIR] [--n POW2]`.
//!
//! Exit codes: 0 success, 2 usage or parameter error (nothing written for
//! the failing experiment), 3 numerical failure (reports still written).

pub mod config;
pub mod experiments;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use lp_tile_core::LabError;
use thiserror::Error;

pub use config::{Config, Params};
pub use experiments::NAMES;
pub use report::{Cell, Outcome, Table, REPORT_SCHEMA};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lp-tile-lab", version, about = "Run square-function, tile, Carleson and multiplier experiments")]
pub struct Args {
    /// Experiment name, or `all` for the whole suite.
    pub experiment: String,
    /// Config file with global keys and `[experiment]` sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for `<experiment>.csv` and `<experiment>.json`.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Grid size for experiments that live on `Z_n`.
    #[arg(long)]
    pub n: Option<usize>,
}

/// Runs one experiment with already-resolved parameters.
pub fn run_experiment(name: &str, params: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    let mut out = experiments::run(name, params, seed)?;
    out.check_finite();
    Ok(out)
}

fn resolve(args: &Args) -> Result<(Config, u64, Vec<&'static str>), CliError> {
    let cfg = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let seed = match (args.seed, cfg.global("seed")) {
        (Some(s), _) => s,
        (None, Some(s)) => s.parse().map_err(|_| CliError::Usage(format!("config seed {s:?} is not a u64")))?,
        (None, None) => 0,
    };
    if let Some(n) = args.n {
        if n < 8 || !n.is_power_of_two() {
            return Err(CliError::Usage(format!("--n {n} is not a power of two >= 8")));
        }
    }
    let names: Vec<&'static str> = if args.experiment == "all" {
        NAMES.to_vec()
    } else {
        let name = NAMES
            .iter()
            .find(|e| **e == args.experiment)
            .ok_or_else(|| CliError::Usage(format!("unknown experiment {:?}; expected one of: all, {}", args.experiment, NAMES.join(", "))))?;
        vec![*name]
    };
    Ok((cfg, seed, names))
}

/// Full command line entry point; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (cfg, seed, names) = match resolve(&args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut code = EXIT_OK;
    for name in names {
        let mut params = cfg.params(name);
        if let (Some(n), true) = (args.n, experiments::uses_grid(name)) {
            params.set("n", &n.to_string());
        }
        let start = Instant::now();
        let out = match run_experiment(name, &mut params, seed) {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {name}: {e}");
                return EXIT_USAGE;
            }
        };
        let info = report::RunInfo { experiment: name, seed, config: params.echo(), wall_time_s: start.elapsed().as_secs_f64() };
        match report::emit(&args.out, &info, &out) {
            Ok((csv, _)) => {
                let status = out.failure.as_deref().unwrap_or("ok");
                println!("{name}: {status} ({} rows, {:.2} s) -> {}", out.table.rows.len(), info.wall_time_s, csv.display());
            }
            Err(e) => {
                eprintln!("error: {name}: cannot write reports: {e}");
                return EXIT_USAGE;
            }
        }
        for w in &out.warnings {
            eprintln!("warning: {name}: {w}");
        }
        if out.failure.is_some() {
            code = EXIT_NUMERICAL;
        }
    }
    code
}
