//! `minset`: batch runs of the dyadic, projection, homology and gluing
//! pipelines from a flat `key = value` config.

mod commands;
mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use config::Config;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Dyadic domain D0 and its boundary complex.
    Grid,
    /// Federer-Fleming projection of a scene onto a dyadic grid.
    Project,
    /// Homology of the cubical complement of a scene.
    Homology,
    /// Boundary slice radius selection.
    Slice,
    /// Competitor gluing with the measure ledger and audit.
    Glue,
    /// Direct topological competitor check in a ball.
    Verify,
    /// Gluing followed by the homology certificate.
    Certify,
    /// Weld-size probe over shell widths and scales.
    Probe,
    /// Blow-up (E - x) / r of a scene.
    Rescale,
}

#[derive(Debug, Parser)]
#[command(name = "minset", version, about = "Polyhedral minimal-set experiments on dyadic grids")]
pub struct Cli {
    pub command: Command,
    /// Scenario config (flat `key = value` text).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Numerical tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

/// A run that could not complete (exit 2) or a check that failed (exit 1).
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn check(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<minset::Error> for Failure {
    fn from(e: minset::Error) -> Self {
        use minset::Error::*;
        match e {
            Exhausted(_) | Unstable(_) | Check(_) => Failure::check(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

/// Files produced by a command and whether its checks passed.
pub struct Report {
    pub files: Vec<(String, String)>,
    pub summary: String,
    pub pass: bool,
}

pub struct Run {
    pub cfg: Config,
    pub seed: u64,
    pub tol: Option<f64>,
}

fn write_files(out: &Path, files: &[(String, String)]) -> Result<(), Failure> {
    for (name, body) in files {
        let path = out.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
        }
        fs::write(&path, body).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Failure::input(format!("--jobs: {e}")))?;
    }
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::empty(),
    };
    let seed = match cli.seed {
        Some(s) => s,
        None => cfg.or("seed", 7)?,
    };
    let tol = match cli.tol {
        Some(t) => Some(t),
        None => cfg.get("tol")?,
    };
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(Failure::input(format!("tolerance must be positive, got {t}")));
        }
    }
    let run = Run { cfg, seed, tol };
    let report = commands::dispatch(cli.command, &run)?;
    run.cfg.check_unused()?;
    fs::create_dir_all(&cli.out).map_err(|e| Failure::input(format!("{}: {e}", cli.out.display())))?;
    write_files(&cli.out, &report.files)?;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(r) => {
            print!("{}", r.summary);
            ExitCode::from(if r.pass { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
