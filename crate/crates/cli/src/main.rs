//! `ptboot`: bootstrap scans, minimizations and reference spectra from the command line.

mod commands;
mod config;
mod error;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_axis, parse_param, Format, RawConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "ptboot", version, about = "Bootstrap spectra of Hermitian and PT-symmetric Hamiltonians")]
struct Cli {
    /// Worker threads for grid evaluation
    #[arg(long, global = true, env = "PTBOOT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a grid and report feasible energy windows
    Scan(RunArgs),
    /// Lowest feasible energy, optionally over a parameter sweep
    Minimize(MinimizeArgs),
    /// Re-refine the windows of a saved scan report
    Refine(RefineArgs),
    /// Reference spectrum from a closed form or finite differences
    Oracle(OracleArgs),
    /// Check the metric operator of the 2x2 model
    ValidateV(ValidateArgs),
    /// Print the x-moment recursion of a polynomial potential as JSON
    Derive(DeriveArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// Flat `key = value` file or a saved JSON report; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// Model parameter, repeatable
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Bootstrap matrix size
    #[arg(long = "K")]
    k: Option<usize>,
    /// Search dimension, repeatable
    #[arg(long = "dim", value_name = "NAME:LO:HI:STEP", allow_hyphen_values = true)]
    dims: Vec<String>,
    /// Relative PSD tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Bisection steps per window edge
    #[arg(long)]
    refine_iters: Option<u32>,
    /// Search for isolated feasible points between samples
    #[arg(long)]
    probe: Option<bool>,
    /// raw or equilibrated
    #[arg(long)]
    scaling: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv (default: from the --out extension, else json)
    #[arg(long)]
    format: Option<String>,
    /// Include every feasible grid point in the output
    #[arg(long)]
    emit_points: bool,
}

#[derive(Args)]
struct MinimizeArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Repeat over a parameter range
    #[arg(long, value_name = "NAME:LO:HI:STEP", allow_hyphen_values = true)]
    sweep: Option<String>,
}

#[derive(Args)]
struct RefineArgs {
    /// JSON report written by `scan`
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    refine_iters: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    /// One of exact_shifted_sho, exact_swanson, exact_poschl_teller, exact_2x2,
    /// exact_coupled_sho, normal_mode, fd_poschl_teller, fd_quartic_pt, fd_quartic, fd_harmonic
    #[arg(long)]
    model: String,
    /// Parameter, repeatable; `N` and `L` set the finite-difference grid
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Write the spectrum as JSON instead of one eigenvalue per line
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, allow_negative_numbers = true)]
    r: f64,
    #[arg(long, allow_negative_numbers = true)]
    s: f64,
    #[arg(long, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct DeriveArgs {
    /// Real parts of c_0, c_1, ... in V = sum c_k x^k
    #[arg(long, allow_hyphen_values = true)]
    coeffs: String,
    /// Imaginary parts, same order
    #[arg(long, allow_hyphen_values = true)]
    imag: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn params(list: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    list.iter().map(|p| parse_param(p)).collect()
}

fn format(text: Option<&str>) -> Result<Option<Format>, CliError> {
    text.map(str::parse).transpose()
}

impl RunArgs {
    fn into_raw(self) -> Result<RawConfig, CliError> {
        let file = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        let mut flags = RawConfig {
            model: self.model,
            params: params(&self.params)?,
            k: self.k,
            tol: self.tol,
            out: self.out,
            format: format(self.format.as_deref())?,
            emit_points: self.emit_points.then_some(true),
            refine_iters: self.refine_iters,
            probe: self.probe,
            scaling: self
                .scaling
                .map(|s| serde_json::from_value(s.clone().into()).map_err(|_| CliError::config(format!("unknown scaling `{s}`"))))
                .transpose()?,
            ..Default::default()
        };
        for d in &self.dims {
            flags.push_dim(parse_axis(d)?);
        }
        Ok(file.merge(flags))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Scan(args) => commands::cmd_scan(args.into_raw()?.resolve()?),
        Command::Minimize(args) => {
            let mut raw = args.run.into_raw()?;
            if let Some(s) = &args.sweep {
                raw.sweep = Some(parse_axis(s)?);
            }
            commands::cmd_minimize(raw.resolve()?)
        }
        Command::Refine(args) => {
            let overrides = RawConfig {
                k: args.k,
                tol: args.tol,
                refine_iters: args.refine_iters,
                out: args.out,
                format: format(args.format.as_deref())?,
                ..Default::default()
            };
            commands::cmd_refine(&args.input, overrides)
        }
        Command::Oracle(args) => {
            commands::cmd_oracle(&args.model, params(&args.params)?, format(args.format.as_deref())?, args.out)
        }
        Command::ValidateV(args) => commands::cmd_validate_v(args.r, args.s, args.theta, format(args.format.as_deref())?),
        Command::Derive(args) => commands::cmd_derive(&args.coeffs, args.imag.as_deref(), args.out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
