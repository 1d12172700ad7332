use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use v2i_radar_cli::{resolve_output_dir, run, Experiment, RunSpec};

/// Run a radar-assisted beam-training experiment and write CSV/JSON results.
#[derive(Debug, Parser)]
#[command(name = "v2i-radar", version)]
struct Cli {
    /// Experiment: golay-check, radar-chain, planner-sweep, rate-sweep,
    /// misalignment, overhead or reproduce-paper.
    #[arg(long)]
    experiment: Experiment,
    /// TOML configuration; the built-in default is used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: $V2I_RADAR_OUT, else ./results).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured Monte Carlo trial count.
    #[arg(long)]
    trials: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = RunSpec {
        experiment: cli.experiment,
        config_path: cli.config,
        output_dir: resolve_output_dir(cli.out),
        seed: cli.seed,
        trials: cli.trials,
    };
    match run(&spec) {
        Ok(summary) => {
            println!("{} -> {}", summary.experiment, spec.output_dir.display());
            for (key, value) in &summary.headline {
                println!("  {key:<30} {value}");
            }
            for note in &summary.notes {
                println!("  note: {note}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
