//! `logevo`: reproducible experiments for the logarithmic damped wave
//! equation. Exit status 0 on success, 1 when a check fails or a computation
//! cannot be decided, 2 on bad usage.

// `!(x > 0.0)` is the NaN-rejecting form of `x <= 0.0`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::{resolve, ConfigFile};
use crate::error::CliError;
use crate::output::{sink, Report};

#[derive(Parser, Debug)]
#[command(
    name = "logevo",
    version,
    about = "Numerical experiments for u_tt + Lu + Lu_t = 0 with L = log(I - Δ)"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML experiment file (schema = "logevo/1").
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// CSV destination; standard output if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON summary destination; `-` for standard output, which then
    /// replaces the CSV there unless --out is given.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Omit the generation time so that reruns are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "LOGEVO_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Symbol values and characteristic roots at one frequency.
    Roots(commands::RootsArgs),
    /// Closed-form mode evolution checked against an RK4 integration.
    Mode(commands::ModeArgs),
    /// One radial integral, or a sweep over t.
    Integral(commands::IntegralArgs),
    /// Compensated I_p or J_p ratio curve and its convergence.
    Ratio(commands::RatioArgs),
    /// Two-sided band check for one of the asymptotic claims.
    Sandwich(commands::SandwichArgs),
    /// Distance between the solution and its large-time profile.
    ProfileError(commands::ProfileErrorArgs),
    /// Spectral solver run on a periodic box.
    Solve(commands::SolveArgs),
    /// Power-law fits of the solution norm and energy.
    Rates(commands::RatesArgs),
    /// Pointwise decay estimates on a (sigma, t) sweep.
    VerifyPointwise(commands::PointwiseArgs),
    /// All headline checks.
    Report(report::ReportArgs),
}

fn merged<T: Serialize + DeserializeOwned>(
    flags: &T,
    cfg: &ConfigFile,
    name: &str,
) -> Result<T, CliError> {
    resolve(flags, cfg.section(name), name)
}

fn dispatch(command: &Command, cfg: &ConfigFile) -> Result<Report, CliError> {
    match command {
        Command::Roots(a) => commands::roots(merged(a, cfg, "roots")?),
        Command::Mode(a) => commands::mode(merged(a, cfg, "mode")?),
        Command::Integral(a) => commands::integral(merged(a, cfg, "integral")?),
        Command::Ratio(a) => commands::ratio(merged(a, cfg, "ratio")?),
        Command::Sandwich(a) => commands::sandwich(merged(a, cfg, "sandwich")?),
        Command::ProfileError(a) => commands::profile_error(merged(a, cfg, "profile-error")?),
        Command::Solve(a) => commands::solve(merged(a, cfg, "solve")?),
        Command::Rates(a) => commands::rates(merged(a, cfg, "rates")?),
        Command::VerifyPointwise(a) => {
            commands::verify_pointwise(merged(a, cfg, "verify-pointwise")?)
        }
        Command::Report(a) => report::report(merged(a, cfg, "report")?),
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let cfg = match &cli.global.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile {
            schema: config::SCHEMA.into(),
            ..Default::default()
        },
    };
    if let Some(n) = cli.global.threads.or(cfg.threads) {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let stamp = (!(cli.global.no_timestamp || cfg.no_timestamp.unwrap_or(false)))
        .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    let rep = dispatch(&cli.command, &cfg)?;
    for w in &rep.warnings {
        eprintln!("warning: {w}");
    }
    if rep.command == "roots" {
        if let Some(text) = rep.summary["text"].as_str() {
            eprintln!("{text}");
        }
    }
    let json_to_stdout = cli
        .global
        .json
        .as_deref()
        .is_some_and(|p| p.as_os_str() == "-");
    match &cli.global.out {
        Some(p) => rep.write_csv(sink(p)?, stamp.as_deref())?,
        None if !json_to_stdout => rep.write_csv(std::io::stdout().lock(), stamp.as_deref())?,
        None => {}
    }
    if let Some(p) = &cli.global.json {
        let mut w = sink(p)?;
        serde_json::to_writer_pretty(&mut w, &rep.json(stamp.as_deref()))
            .map_err(std::io::Error::other)?;
        writeln!(w)?;
    }
    if rep.failed() {
        eprintln!("verification failed: {}", rep.command);
    }
    Ok(!rep.failed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("logevo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
