//! Command-line front end: subcommands, configuration and report output.

pub mod config;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use cbose_core::checks::{run_suite, Suite};
use cbose_core::dyson::{assemble_bound, fixed_n_bound, minimize_variational};
use cbose_core::jellium::assemble_jellium;
use cbose_core::kernels::{compute_i0, I0};
use clap::{Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use config::{load_config, Format, RunConfig};
use report::{write_report, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "PROG_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] cbose_core::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cbose",
    version,
    about = "Charged Bose gas energy bounds and verification suites"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML or JSON run configuration (by extension).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Condensate number for `two-component`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub n: Option<f64>,
    /// Density for `one-component`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    /// Momentum cutoff for both bound commands.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Include wall time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// I0 by quadrature and in closed form, the constant A and virial residuals.
    Constants,
    /// Minimize the reduced functional; outputs the profile and A.
    Minimize,
    /// Itemized upper bound for the two-component gas.
    TwoComponent,
    /// Itemized energy per volume for the one-component gas.
    OneComponent,
    /// Run the verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Minimize => "minimize",
            Command::TwoComponent => "two-component",
            Command::OneComponent => "one-component",
            Command::Verify { .. } => "verify",
        }
    }

    fn units(self) -> &'static str {
        match self {
            Command::Constants => "hbar = m = charge = 1; I0 and A dimensionless",
            Command::Minimize => "hbar = m = charge = 1; radius in n^(-1/5) units",
            Command::TwoComponent => "hbar = m = charge = 1; energies absolute; exponents of n",
            Command::OneComponent => {
                "hbar = m = charge = 1; energy per volume; l and r in rho^(-1/3) units"
            }
            Command::Verify { .. } => "dimensionless check values",
        }
    }
}

/// Result of one command before serialization.
pub struct Outcome {
    pub results: serde_json::Value,
    pub table: Table,
    pub passed: bool,
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Output(e.to_string()))
}

fn constants(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let i0 = compute_i0()?;
    let var = minimize_variational(I0, &cfg.minimize)?;
    let results = json!({
        "I0": {
            "quadrature": i0.quadrature,
            "quadrature_error": i0.quadrature_error,
            "closed_form": i0.closed_form,
            "relative_gap": i0.relative_gap(),
            "printed_closed_form": i0.printed_closed_form,
            "printed_relative_gap": i0.printed_relative_gap(),
        },
        "A": var.a,
        "virial_kinetic": var.virial_kinetic,
        "virial_energy": var.virial_energy,
    });
    let mut table = Table::new(&["quantity", "value"]);
    for (k, v) in [
        ("I0_quadrature", i0.quadrature),
        ("I0_closed_form", i0.closed_form),
        ("I0_printed_closed_form", i0.printed_closed_form),
        ("A", var.a),
        ("virial_kinetic", var.virial_kinetic),
        ("virial_energy", var.virial_energy),
    ] {
        table.push(vec![k.to_string(), v.to_string()]);
    }
    Ok(Outcome {
        results,
        table,
        passed: true,
    })
}

fn minimize(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let var = minimize_variational(I0, &cfg.minimize)?;
    let mut table = Table::new(&["r", "phi"]);
    for (k, v) in var.profile.values.iter().enumerate() {
        table.push(vec![(k as f64 * var.profile.h).to_string(), v.to_string()]);
    }
    let results = json!({
        "A": var.a,
        "energy": var.energy,
        "kinetic": var.kinetic,
        "potential": var.potential,
        "virial_kinetic": var.virial_kinetic,
        "virial_energy": var.virial_energy,
        "iterations": var.iterations,
        "stationarity": var.stationarity,
        "boundary_ratio": var.boundary_ratio,
        "profile": to_value(&var.profile)?,
    });
    Ok(Outcome {
        results,
        table,
        passed: true,
    })
}

fn two_component(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tc = &cfg.two_component;
    let params = tc
        .trial_parameters()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let var = minimize_variational(I0, &cfg.minimize)?;
    let bound = assemble_bound(&var.profile, &params)?;
    let mut table = Table::bound_terms(&bound, "");
    // The fixed-N form needs a finite number variance, hence ε > 0.
    let fixed = if tc.eps > 0.0 {
        let f = fixed_n_bound(&var.profile, tc.n, tc.eps, &tc.constants)?;
        table.extend_bound_terms(&f, "fixed_n.");
        Some(f)
    } else {
        None
    };
    let results = json!({
        "A": var.a,
        "ell": params.ell(),
        "bound": to_value(&bound)?,
        "fixed_n": to_value(&fixed)?,
    });
    Ok(Outcome {
        results,
        table,
        passed: true,
    })
}

fn one_component(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rep = assemble_jellium(&cfg.one_component)?;
    let table = Table::bound_terms(&rep.bound, "");
    Ok(Outcome {
        results: to_value(&rep)?,
        table,
        passed: true,
    })
}

fn verify(cfg: &RunConfig, suite: Suite) -> Result<Outcome, CliError> {
    let checks = run_suite(suite, cfg.seed)?;
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}/{}", c.suite, c.name))
        .collect();
    let mut table = Table::new(&["suite", "name", "passed", "value", "tolerance", "detail"]);
    for c in &checks {
        table.push(vec![
            c.suite.to_string(),
            c.name.clone(),
            c.passed.to_string(),
            c.value.to_string(),
            c.tolerance.to_string(),
            c.detail.clone(),
        ]);
    }
    for c in checks.iter().filter(|c| !c.passed) {
        eprintln!(
            "FAIL {}/{}: value {:e}, tolerance {:e} ({})",
            c.suite, c.name, c.value, c.tolerance, c.detail
        );
    }
    let results = json!({
        "suite": suite,
        "seed": cfg.seed,
        "passed": failed.is_empty(),
        "total": checks.len(),
        "failed": failed,
        "checks": to_value(&checks)?,
    });
    Ok(Outcome {
        results,
        table,
        passed: failed.is_empty(),
    })
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Config(format!(
                "{THREADS_VAR} must be a positive integer, got '{v}'"
            ))
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// Effective configuration: file (or defaults) with command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.n {
        cfg.two_component.n = n;
    }
    if let Some(rho) = cli.rho {
        cfg.one_component.rho = rho;
    }
    if let Some(eps) = cli.eps {
        cfg.two_component.eps = eps;
        cfg.one_component.eps = Some(eps);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one command; returns whether its checks passed.
pub fn execute(cli: &Cli) -> Result<bool, CliError> {
    let cfg = resolve_config(cli)?;
    let pool = thread_pool()?;
    let start = Instant::now();
    let outcome = pool.install(|| match cli.command {
        Command::Constants => constants(&cfg),
        Command::Minimize => minimize(&cfg),
        Command::TwoComponent => two_component(&cfg),
        Command::OneComponent => one_component(&cfg),
        Command::Verify { suite } => verify(&cfg, suite),
    })?;
    let report = Report {
        command: cli.command.name().to_string(),
        version: env!("CARGO_PKG_VERSION"),
        units: cli.command.units(),
        wall_time_s: cli.timing.then(|| start.elapsed().as_secs_f64()),
        config: cfg.clone(),
        results: outcome.results,
    };
    write_report(&report, &outcome.table, cli.out.as_deref(), cfg.format)?;
    Ok(outcome.passed)
}

/// Parses `argv` (including the program name) and runs it. Returns the exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("cbose: {e}");
            e.exit_code()
        }
    }
}
