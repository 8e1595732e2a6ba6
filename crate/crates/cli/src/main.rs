//! weylbox: experiments on local mean values of Weyl sums.
//!
//! Exit codes: 0 ok, 1 usage or invalid parameters, 2 hard-identity
//! failure, 3 resource budget exceeded.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use weylbox::LabError;

use output::{append_line, record, Output};

#[derive(Parser, Serialize, Debug)]
#[command(name = "weylbox", version, about = "Local mean values of Weyl sums", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Serialize, Debug)]
pub struct Global {
    /// JSON config file; its keys are flag names and flags win on conflict
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker thread cap
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output format
    #[arg(long, alias = "format", global = true, value_enum, default_value_t = Emit::Json)]
    pub emit: Emit,

    /// Append the JSON record to this file (or write the CSV there)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Constant override name=value (c, C, gamma, Gamma, envelope, eps)
    #[arg(long = "const", global = true, value_name = "NAME=VALUE")]
    pub consts: Vec<String>,

    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Memory cap in bytes for exact counting tables
    #[arg(long = "mem-budget", global = true)]
    pub mem_budget: Option<u128>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Json,
    Csv,
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Exact solution counts of Vinogradov systems
    Count(commands::CountArgs),
    /// Mean value of |S|^{2s} over a box
    Integrate(commands::IntegrateArgs),
    /// Empirical growth exponent over an N ladder
    Kappa(commands::KappaArgs),
    /// Exponent curve of one bound source
    Bounds(commands::BoundsArgs),
    /// Polylines of a comparison figure
    Plotdata(commands::PlotArgs),
    /// Level-set measure or its envelope check
    Levelset(commands::LevelsetArgs),
    /// Rational structure behind a large Weyl sum
    Structure(commands::StructureArgs),
    /// Lower-bound witness set inside a box
    Witness(commands::WitnessArgs),
    /// Complete sums over a prime field
    Fieldscan(commands::FieldscanArgs),
    /// Run the acceptance suite
    Verify(commands::VerifyArgs),
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<LabError>() {
        Some(LabError::HardIdentity(_)) => 2,
        Some(LabError::Budget { .. }) | Some(LabError::Overflow(_)) => 3,
        _ => 1,
    }
}

fn emit(cli: &Cli, out: &Output, elapsed: f64) -> Result<()> {
    let config = serde_json::to_value(cli)?;
    match (cli.global.emit, &cli.global.out) {
        (Emit::Json, None) => {
            println!("{}", serde_json::to_string(&record(&config, &out.payload, elapsed))?);
            eprintln!("{}", out.summary);
        }
        (Emit::Json, Some(p)) => {
            append_line(p, &serde_json::to_string(&record(&config, &out.payload, elapsed))?)?;
            println!("{}", out.summary);
        }
        (Emit::Csv, dest) => {
            let Some(csv) = &out.csv else {
                bail!(LabError::Domain("this subcommand has no CSV form; use --emit json".into()));
            };
            match dest {
                None => {
                    print!("{}", csv.render());
                    eprintln!("{}", out.summary);
                }
                Some(p) => {
                    std::fs::write(p, csv.render())?;
                    println!("{}", out.summary);
                }
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.global.threads {
        if t == 0 {
            bail!(LabError::Domain("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let t0 = Instant::now();
    let out = commands::dispatch(cli)?;
    emit(cli, &out, t0.elapsed().as_secs_f64())?;
    if let Command::Verify(_) = cli.command {
        commands::verify_status(&out)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv = match config::merged_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
