use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use deq_cli::{
    cmd_converge, cmd_integrate, cmd_limits, cmd_nodes, write_csv, CliError, CliResult,
    ConvergeRequest, IntegrateRequest, LimitsReport, Stopping,
};
use deq_core::cases::{DEFAULT_DELTA, DEFAULT_GUARD_A};
use deq_core::{ModelName, SpacingKind, SpacingStrategy};

/// Underflow-aware tanh-sinh quadrature.
#[derive(Debug, Parser)]
#[command(name = "deq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Window limits and the maximal order of a float model.
    Limits {
        #[arg(long)]
        model: ModelName,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        json: bool,
    },
    /// Node table as JSON.
    Nodes {
        #[arg(long)]
        model: ModelName,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        strategy: SpacingKind,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Integrate a benchmark case.
    Integrate(IntegrateArgs),
    /// Relative error against order for each method, written as CSV.
    Converge {
        #[arg(long)]
        case: String,
        #[arg(long, value_delimiter = ',', required = true)]
        models: Vec<ModelName>,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: CaseParams,
    },
}

#[derive(Debug, Args)]
struct CaseParams {
    /// Lower limit of the reciprocal case.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Guard factor a of the reciprocal case.
    #[arg(long = "guard-a", default_value_t = DEFAULT_GUARD_A)]
    guard_a: f64,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("stop").required(true).args(["rel_tol", "n"])))]
struct IntegrateArgs {
    #[arg(long)]
    case: String,
    #[arg(long, default_value = "double")]
    model: ModelName,
    #[arg(long, default_value = "maximal")]
    strategy: SpacingKind,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// First order of the doubling ladder.
    #[arg(long, default_value_t = 4)]
    n_start: usize,
    /// Highest order of the doubling ladder.
    #[arg(long)]
    n_limit: Option<usize>,
    #[command(flatten)]
    params: CaseParams,
    #[arg(long)]
    json: bool,
}

fn strategy(kind: SpacingKind) -> SpacingStrategy {
    match kind {
        SpacingKind::Optimal => SpacingStrategy::optimal(),
        SpacingKind::Maximal => SpacingStrategy::maximal(),
    }
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Limits { model, dim, json } => {
            let report = cmd_limits(model, dim)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("{}\n{report}", LimitsReport::HEADER);
            }
        }
        Command::Nodes {
            model,
            n,
            strategy: kind,
            dim,
        } => {
            let doc = cmd_nodes(model, n, strategy(kind), dim)?;
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Command::Integrate(args) => {
            let stopping = match (args.rel_tol, args.n) {
                (Some(rel_tol), None) => Stopping::Tolerance {
                    rel_tol,
                    n_start: args.n_start,
                    n_limit: args.n_limit,
                },
                (None, Some(n)) => Stopping::Order(n),
                _ => return Err(CliError::Invalid("give exactly one of --rel-tol and --n".into())),
            };
            let report = cmd_integrate(&IntegrateRequest {
                case: args.case,
                model: args.model,
                strategy: strategy(args.strategy),
                stopping,
                delta: args.params.delta,
                guard_a: args.params.guard_a,
            })?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("{report}");
            }
            if !report.converged {
                return Ok(3);
            }
        }
        Command::Converge {
            case,
            models,
            n_max,
            out,
            params,
        } => {
            let sweep = cmd_converge(&ConvergeRequest {
                case,
                models,
                n_max,
                delta: params.delta,
                guard_a: params.guard_a,
            })?;
            write_csv(&sweep, &out)?;
            println!("{} rows written to {}", sweep.records.len(), out.display());
            for line in &sweep.omitted {
                println!("{line}");
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
