use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::bail;
use clap::{Parser, Subcommand};
use loopax_cli::{emit, find, list, Experiment, ExperimentConfig, Format, Plan, RunContext, REGISTRY};

#[derive(Parser)]
#[command(name = "loopax", version, about = "Verification experiments for loop ax+b representations and sl(2,R) correlators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List experiments whose id or module starts with FILTER.
    List { filter: Option<String> },
    /// Run experiments and write their reports.
    Run {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        experiment: Option<String>,
        #[arg(long)]
        all: bool,
        /// Overrides the configured base seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
        /// Defaults to both CSV and JSON.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Enables the deliberate-perturbation controls.
        #[arg(long)]
        sensitivity: bool,
        /// Configuration file replacing the bundled default (single experiment only).
        #[arg(long, requires = "experiment")]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match try_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn try_main() -> anyhow::Result<bool> {
    match Cli::parse().command {
        Command::List { filter } => {
            for e in list(filter.as_deref().unwrap_or("")) {
                println!("{:<22} {:<15} {}", e.id, e.module, e.description);
            }
            Ok(true)
        }
        Command::Run { experiment, all, seed, out, format, sensitivity, config } => {
            let selected: Vec<&Experiment> = match (&experiment, all) {
                (Some(id), _) => vec![find(id)?],
                (None, true) => REGISTRY.iter().collect(),
                (None, false) => bail!("pass --experiment <id> or --all"),
            };
            // Every configuration is validated before anything is computed.
            let mut plans: Vec<(&Experiment, Plan, u64)> = Vec::new();
            for e in selected {
                let cfg = match &config {
                    Some(path) => ExperimentConfig::load(path)?,
                    None => e.default_config(),
                };
                let plan = e.prepare(&cfg)?;
                plans.push((e, plan, seed.unwrap_or(cfg.seed)));
            }
            let mut all_passed = true;
            for (e, plan, seed) in &plans {
                let start = Instant::now();
                let report = e.execute(plan, RunContext { seed: *seed, sensitivity })?;
                let files = emit(&report, &out, format)?;
                let verdict = if report.passed() { "PASS" } else { "FAIL" };
                println!(
                    "{verdict} {:<22} {}/{} checks passed in {:.1}s -> {}",
                    e.id,
                    report.rows.len() - report.failures(),
                    report.rows.len(),
                    start.elapsed().as_secs_f64(),
                    files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>().join(", ")
                );
                all_passed &= report.passed();
            }
            Ok(all_passed)
        }
    }
}
