//! `stochorder`: stochastic order checks from the command line.
//!
//! Exit status 0 means the property holds (or the computation succeeded),
//! 1 that it fails with a witness in the report, 2 an input or usage error
//! and 3 an internal inconsistency. The JSON report goes to stdout, a one
//! line summary to stderr.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use stochorder::apps::{BsParams, Utility};
use stochorder::{Mode, Relation};

use commands::{Condition, Format, Functional, TableKind};
use report::{failure_report, Failure};

#[derive(Parser, Debug)]
#[command(
    name = "stochorder",
    version,
    about = "Stochastic order and dependence-condition checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RelationArg {
    Ssd,
    Icx,
    Cx,
    St,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConditionArg {
    New,
    Classic,
    Icx,
    Cx,
    Thm2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    /// `X >=ssd Y`: supermartingale coupling
    Ssd,
    /// `X <=cx Y`: martingale coupling
    Cx,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableArg {
    Gaussian,
    Bernoulli,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Md,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide `X >=ssd Y`, `X >=icx Y`, `X <=cx Y` or `X >=st Y`.
    CheckOrder {
        #[arg(long, value_enum)]
        relation: RelationArg,
        x: PathBuf,
        y: PathBuf,
    },
    /// Check a dependence condition on a joint law of `(W, Z)`.
    CheckCond {
        #[arg(long, value_enum)]
        which: ConditionArg,
        joint: PathBuf,
    },
    /// Build a coupling of `X` and `Y` (see STOCHORDER_MAX_SUPPORT).
    Synthesize {
        #[arg(long, value_enum)]
        mode: ModeArg,
        x: PathBuf,
        y: PathBuf,
        /// Also write the coupling, as a joint law, to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Region tables for the Gaussian and Bernoulli families.
    Table {
        #[arg(value_enum)]
        family: TableArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long, default_value = "default")]
        grid: String,
    },
    /// Is `Z` an improver of `X`, and does the sufficient condition hold?
    Improver { joint: PathBuf },
    /// Sufficient condition for wide marketability at premium floor `p0`.
    Marketable {
        #[arg(long)]
        indemnity: PathBuf,
        #[arg(long)]
        loss: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        p0: String,
    },
    /// Indifference premium of an indemnity.
    Premium {
        /// `linear`, `exp:a` or `power:gamma`
        #[arg(long, value_parser = commands::parse_utility)]
        utility: Utility,
        #[arg(long, allow_negative_numbers = true)]
        wealth: f64,
        #[arg(long)]
        loss: PathBuf,
        #[arg(long)]
        indemnity: PathBuf,
    },
    /// Stop-loss premiums of `X` and `X + Z` from a joint law of `(X, Z)`.
    StoplossCompare {
        joint: PathBuf,
        /// Deductibles to compare at; defaults to all atoms.
        #[arg(long = "deductible", allow_negative_numbers = true)]
        deductibles: Vec<String>,
    },
    /// Protective put in a zero-rate Black-Scholes market.
    ProtectivePut {
        #[arg(long, default_value_t = 1.0)]
        spot: f64,
        #[arg(long, default_value_t = 1.0)]
        strike: f64,
        #[arg(long, default_value_t = 0.2)]
        sigma: f64,
        #[arg(long, default_value_t = -0.05, allow_negative_numbers = true)]
        drift: f64,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        /// Evaluation times, repeatable.
        #[arg(long = "t", default_values_t = [0.25, 0.5, 0.75])]
        times: Vec<f64>,
    },
    /// Expected shortfall `ES_p`.
    Es {
        #[arg(long)]
        level: String,
        law: PathBuf,
    },
    /// `(1-p) ES_p`.
    Phi {
        #[arg(long)]
        level: String,
        law: PathBuf,
    },
    /// Stop-loss premium `E[(X - d)+]`.
    Stoploss {
        #[arg(long, allow_negative_numbers = true)]
        deductible: String,
        law: PathBuf,
    },
    /// Equal-probability discretization of a parametric law.
    Discretize {
        #[arg(long)]
        grid: usize,
        law: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Randomized consistency run of the sufficient conditions.
    Selfcheck {
        #[arg(long, default_value_t = commands::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckOrder { .. } => "check-order",
            Command::CheckCond { .. } => "check-cond",
            Command::Synthesize { .. } => "synthesize",
            Command::Table { .. } => "table",
            Command::Improver { .. } => "improver",
            Command::Marketable { .. } => "marketable",
            Command::Premium { .. } => "premium",
            Command::StoplossCompare { .. } => "stoploss-compare",
            Command::ProtectivePut { .. } => "protective-put",
            Command::Es { .. } => "es",
            Command::Phi { .. } => "phi",
            Command::Stoploss { .. } => "stoploss",
            Command::Discretize { .. } => "discretize",
            Command::Selfcheck { .. } => "selfcheck",
        }
    }

    fn run(self) -> Result<report::Outcome, Failure> {
        match self {
            Command::CheckOrder { relation, x, y } => {
                let r = match relation {
                    RelationArg::Ssd => Relation::Ssd,
                    RelationArg::Icx => Relation::Icx,
                    RelationArg::Cx => Relation::Cx,
                    RelationArg::St => Relation::St,
                };
                commands::check_order(r, &x, &y)
            }
            Command::CheckCond { which, joint } => {
                let c = match which {
                    ConditionArg::New => Condition::New,
                    ConditionArg::Classic => Condition::Classic,
                    ConditionArg::Icx => Condition::Icx,
                    ConditionArg::Cx => Condition::Cx,
                    ConditionArg::Thm2 => Condition::Thm2,
                };
                commands::check_cond(c, &joint)
            }
            Command::Synthesize { mode, x, y, output } => {
                let m = match mode {
                    ModeArg::Ssd => Mode::Supermartingale,
                    ModeArg::Cx => Mode::Martingale,
                };
                commands::synthesize_cmd(m, &x, &y, output.as_deref())
            }
            Command::Table { family, format, grid } => {
                let k = match family {
                    TableArg::Gaussian => TableKind::Gaussian,
                    TableArg::Bernoulli => TableKind::Bernoulli,
                };
                let f = match format {
                    FormatArg::Json => Format::Json,
                    FormatArg::Csv => Format::Csv,
                    FormatArg::Md => Format::Md,
                };
                commands::table(k, f, &grid)
            }
            Command::Improver { joint } => commands::improver(&joint),
            Command::Marketable { indemnity, loss, p0 } => commands::marketable(&indemnity, &loss, &p0),
            Command::Premium {
                utility,
                wealth,
                loss,
                indemnity,
            } => commands::premium(utility, wealth, &loss, &indemnity),
            Command::StoplossCompare { joint, deductibles } => commands::stoploss_compare(&joint, &deductibles),
            Command::ProtectivePut {
                spot,
                strike,
                sigma,
                drift,
                horizon,
                times,
            } => {
                let params = BsParams::new(spot, strike, sigma, drift, horizon)?;
                commands::protective_put(params, &times)
            }
            Command::Es { level, law } => commands::functional(Functional::Es, &level, &law),
            Command::Phi { level, law } => commands::functional(Functional::Phi, &level, &law),
            Command::Stoploss { deductible, law } => commands::functional(Functional::StopLoss, &deductible, &law),
            Command::Discretize { grid, law, output } => commands::discretize(&law, grid, output.as_deref()),
            Command::Selfcheck { seed, count } => commands::selfcheck(seed, count),
        }
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    let name = cli.command.name();
    let started = Instant::now();
    match cli.command.run() {
        Ok(out) => {
            match &out.text {
                Some(t) => print!("{t}"),
                None => print_json(&out.report(name, started.elapsed())),
            }
            eprintln!("{name}: {}", out.summary);
            ExitCode::from(out.exit_code())
        }
        Err(f) => {
            print_json(&failure_report(name, &f, started.elapsed()));
            eprintln!("{name}: error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
