//! Command-line front end: `solve`, `stability`, `verify-reduction`,
//! `verify-hk` and `deg-p1`.
//!
//! Exit codes: 0 when every check passes, 2 when some check fails (the
//! report is still written), 1 on usage or configuration errors.

pub mod commands;
pub mod config;
pub mod report;

use crate::geometry::P1Quadrature;
use crate::Result;
use clap::{Parser, Subcommand};
use commands::Outcome;
use config::RunConfig;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "DCVORTEX_THREADS";

#[derive(Debug, Parser)]
#[command(name = "dcvortex", version, about = "Doubly-coupled vortex equations on the flat torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Solver target residual (overrides solver.target_residual).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for every randomised step.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the vortex equations and write the residual history.
    Solve(RunArgs),
    /// Decide τ-stability over the coordinate and configured sub-objects.
    Stability(RunArgs),
    /// Solve, then check the Hermitian–Einstein equation on X×P¹.
    VerifyReduction(RunArgs),
    /// Check the quaternionic relations and the moment map.
    VerifyHk(RunArgs),
    /// Degree of O(n) with its Fubini–Study metric, by quadrature.
    DegP1 {
        #[arg(allow_negative_numbers = true)]
        n: i32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(args: &RunArgs) -> Result<(RunConfig, String)> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = RunConfig::from_toml(&text)?;
    if let Some(dir) = &args.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(t) = args.tol {
        cfg.solver.target_residual = t;
    }
    if let Some(s) = args.seed {
        cfg.solver.seed = s;
        cfg.reduction.seed = s;
        cfg.hyperkahler.seed = s;
    }
    cfg.validate()?;
    Ok((cfg, text))
}

fn write_outputs(out: &Outcome, dir: &Path, cfg: Option<&config::OutputConfig>) -> Result<()> {
    let names = cfg.cloned().unwrap_or_default();
    std::fs::create_dir_all(dir)?;
    out.report.write(&dir.join(&names.report))?;
    if let Some(h) = &out.history {
        report::write_history_csv(h, std::fs::File::create(dir.join(&names.history))?)?;
    }
    if let Some(c) = &out.catalog {
        c.write_csv(std::fs::File::create(dir.join(&names.catalog))?)?;
    }
    Ok(())
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second initialisation in the same process is harmless to ignore
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn execute(cmd: &Command) -> Result<bool> {
    let (outcome, dir, names) = match cmd {
        Command::DegP1 { n, out } => {
            let o = commands::cmd_deg_p1(*n, &P1Quadrature::default_resolution(), 1e-6)?;
            (o, out.clone().unwrap_or_else(|| PathBuf::from("out")), None)
        }
        Command::Solve(a) | Command::Stability(a) | Command::VerifyReduction(a) | Command::VerifyHk(a) => {
            let (cfg, text) = load(a)?;
            let o = match cmd {
                Command::Solve(_) => commands::cmd_solve(&cfg, &text)?,
                Command::Stability(_) => commands::cmd_stability(&cfg, &text)?,
                Command::VerifyReduction(_) => commands::cmd_verify_reduction(&cfg, &text)?,
                _ => commands::cmd_verify_hk(&cfg, &text)?,
            };
            (o, cfg.output.dir.clone(), Some(cfg.output))
        }
    };
    write_outputs(&outcome, &dir, names.as_ref())?;
    for c in &outcome.report.checks {
        println!("{:<32} {} value={:e} tol={:e}", c.name, if c.passed { "PASS" } else { "FAIL" }, c.value, c.tolerance);
    }
    Ok(outcome.report.passed)
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match execute(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
