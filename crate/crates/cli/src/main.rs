use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use statecap_cli::input::{load_params, load_raw, parse_cost};
use statecap_cli::report::validate_bargaining;
use statecap_cli::sweep::point_columns;
use statecap_cli::{
    render_bargain, render_solve, run_sweep, run_verify, solve_point, write_file, Axis, CliError,
    SweepSpec, VerifyConfig, CSV_HEADER,
};
use statecap_core::params::Profile;
use statecap_core::policy::Variant;

#[derive(Parser)]
#[command(
    name = "statecap",
    version,
    about = "Civil war, external threat and fiscal capacity equilibria"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Baseline,
    Revolution,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Baseline => Variant::Baseline,
            VariantArg::Revolution => Variant::Revolution,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Model variant to solve.
    #[arg(long, value_enum, default_value = "baseline")]
    variant: VariantArg,
    /// Investment cost: quadratic:c=VALUE or tabulated:x0:y0,x1:y1,...
    #[arg(long, default_value = "quadratic:c=1")]
    cost: String,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the equilibrium at one parameter point.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Also write the point as a CSV row.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep two parameters over a grid and write a CSV regime map.
    Sweep {
        /// Values for the fields that are not swept.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        axis1: Axis,
        #[arg(long)]
        axis2: Axis,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Check the model's properties on seeded random draws.
    Verify {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "baseline")]
        variant: VariantArg,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Report the bargaining stage for one parameter point.
    Bargain {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "quadratic:c=1")]
        cost: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    print!("{text}");
    match out {
        Some(path) => write_file(path, text),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            config,
            out,
            common,
        } => {
            let cost = parse_cost(&common.cost)?;
            let params = load_params(&config, Profile::Baseline)?;
            let variant = common.variant.into();
            print!("{}", render_solve(&params, &cost, variant));
            if let Some(path) = out {
                let header = CSV_HEADER.splitn(3, ',').nth(2).unwrap_or(CSV_HEADER);
                let row = point_columns(&solve_point(&params, &cost, variant));
                write_file(&path, &format!("{header}\n{row}\n"))?;
            }
            Ok(())
        }
        Command::Sweep {
            config,
            axis1,
            axis2,
            out,
            workers,
            common,
        } => {
            let spec = SweepSpec {
                axis1,
                axis2,
                fixed: load_raw(&config)?,
                variant: common.variant.into(),
                cost: parse_cost(&common.cost)?,
            };
            let csv = run_sweep(&spec, workers)?;
            match out {
                Some(path) => write_file(&path, &csv),
                None => {
                    print!("{csv}");
                    Ok(())
                }
            }
        }
        Command::Verify {
            trials,
            seed,
            variant,
            out,
            workers,
        } => {
            let report = run_verify(&VerifyConfig {
                trials,
                seed,
                variant: variant.into(),
                workers,
            })?;
            emit(&report.render(), out.as_ref())?;
            match report.failures() {
                0 => Ok(()),
                failures => Err(CliError::PropertyFailure { failures }),
            }
        }
        Command::Bargain { config, cost, out } => {
            let cost = parse_cost(&cost)?;
            let params = validate_bargaining(&load_raw(&config)?)?;
            emit(&render_bargain(&params, &cost), out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
