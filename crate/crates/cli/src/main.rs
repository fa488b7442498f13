use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ringvcs_cli::campaign::{run_campaign, CampaignSummary};
use ringvcs_cli::error::{HarnessError, IoContext};
use ringvcs_cli::plan::PlanArgs;
use ringvcs_cli::plots::emit_plots;
use ringvcs_cli::tables::{build_tables, inspect_report};
use ringvcs_cli::trend::density_trend;

const PLAN_KEYS: &str = "\
Plan file: one `key = value` per line, `#` starts a comment. Keys are the
flag names without leading dashes: nodes, width, height, sink-x, sink-y,
range, model, eta, sigma, mode, slots, seed, replicates, delta, max-ring,
digits, out. Flags given on the command line override the file.

Example:
  nodes = 50..750:100
  replicates = 20
  model = both
  seed = 7
  out = results/fig5";

#[derive(Parser)]
#[command(name = "ringvcs", version, about = "Ring-based virtual coordinates for sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run simulations configured entirely from flags
    Simulate(PlanArgs),
    /// Run a campaign described by a plan file
    #[command(after_help = PLAN_KEYS)]
    Campaign {
        #[arg(long)]
        plan: PathBuf,
        #[command(flatten)]
        overrides: PlanArgs,
    },
    /// Write gnuplot data and script for a campaign directory
    Plot {
        #[arg(long = "in")]
        dir: PathBuf,
    },
    /// Build or check offset tables
    #[command(subcommand)]
    Table(TableCommand),
}

#[derive(Subcommand)]
enum TableCommand {
    /// Write table_n{n}.csv for rings FROM..=TO
    Build {
        #[arg(long, default_value_t = 1)]
        from: u32,
        #[arg(long, default_value_t = 5)]
        to: u32,
        #[arg(long, default_value_t = 10.0)]
        range: f64,
        /// Offset step [default: 0.01·range]
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value = "tables")]
        out: PathBuf,
    },
    /// Check monotonicity and conservation of table files
    Inspect {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

fn print_summary(summary: &CampaignSummary) {
    for (name, m) in &summary.models {
        println!(
            "{name}: {} runs, {} node samples, mean collisions {}, uninitialized sensors {}, aggregate {}",
            m.runs,
            m.aggregate.total().samples,
            m.aggregate.global_mean(),
            m.uninitialized,
            m.aggregate_path.display()
        );
        match density_trend(&m.per_count, 20..=90) {
            Some(fit) => println!(
                "{name}: density slope {} ± {} per node (t = {}, {})",
                fit.count_slope,
                fit.t_critical * fit.count_slope_se,
                fit.t_statistic(),
                if fit.density_independent() { "not significant" } else { "significant" }
            ),
            None => println!("{name}: too few degree buckets for a density trend"),
        }
    }
    for f in &summary.failures {
        eprintln!(
            "run failed: model {:?} count {} replicate {}: {}",
            f.model, f.count, f.replicate, f.reason
        );
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Simulate(args) => print_summary(&run_campaign(&args.into_plan()?)?),
        Command::Campaign { plan, overrides } => {
            let text = fs::read_to_string(&plan).at(&plan)?;
            let merged = overrides.over(PlanArgs::from_kv(&text)?);
            print_summary(&run_campaign(&merged.into_plan()?)?);
        }
        Command::Plot { dir } => {
            let files = emit_plots(&dir)?;
            for p in files.series.iter().chain([&files.theory, &files.script]) {
                println!("{}", p.display());
            }
        }
        Command::Table(TableCommand::Build { from, to, range, delta, out }) => {
            for p in build_tables(from..=to, range, delta.unwrap_or(0.01 * range), &out)? {
                println!("{}", p.display());
            }
        }
        Command::Table(TableCommand::Inspect { files }) => {
            for f in files {
                println!("{}", inspect_report(&f)?);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
