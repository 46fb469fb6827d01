use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qd_suite::harness::{self, Overrides};
use qd_suite::QdError;

#[derive(Parser)]
#[command(name = "qd-suite", version, about = "Quality-Diversity benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment or a named preset grid.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_parser = harness::PRESET_NAMES)]
        preset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        /// Base seed; runs use seed, seed+1, ...
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        /// Accept deceptive mixtures whose global maximum is not at mu2.
        #[arg(long)]
        allow_invalid_argmax: bool,
    },
    /// Parse and validate a configuration, printing the resolved form.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute aggregates for a batch directory.
    Aggregate { batch_dir: PathBuf },
}

fn exit_code(e: &QdError) -> u8 {
    match e {
        QdError::Config { .. } | QdError::Parse(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            preset,
            out,
            workers,
            seed,
            runs,
            allow_invalid_argmax,
        } => {
            let ov = Overrides {
                seed,
                runs,
                output_dir: out,
                workers,
                allow_invalid_argmax,
            };
            run(config, preset, &ov)
        }
        Command::Validate { config } => harness::load_config(&config).map(|cfg| {
            println!("{}", serde_json::to_string_pretty(&cfg).expect("serializable config"));
        }),
        Command::Aggregate { batch_dir } => harness::aggregate_dir(&batch_dir).map(|dirs| {
            for d in dirs {
                println!("aggregated {}", d.display());
            }
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(config: Option<PathBuf>, preset: Option<String>, ov: &Overrides) -> qd_suite::Result<()> {
    let experiments = match (config, preset) {
        (Some(path), None) => vec![harness::load_config_with(&path, ov)?],
        (None, Some(name)) => {
            let mut subs = harness::preset(&name)?;
            for cfg in &mut subs {
                apply_overrides(cfg, &name, ov);
            }
            subs
        }
        _ => {
            return Err(QdError::Config {
                path: "cli".into(),
                message: "pass exactly one of --config or --preset".into(),
            })
        }
    };
    for cfg in &experiments {
        cfg.validate()?;
    }
    for cfg in &experiments {
        let summary = harness::run_batch(cfg)?;
        println!(
            "{}: {} runs, final coverage {:.3} +/- {:.3}, union {:.3} -> {}",
            summary.name,
            summary.runs,
            summary.final_coverage_mean,
            summary.final_coverage_std,
            summary.final_union_coverage,
            summary.directory.display()
        );
    }
    Ok(())
}

fn apply_overrides(cfg: &mut harness::ExperimentConfig, preset: &str, ov: &Overrides) {
    if ov.seed.is_some() || ov.runs.is_some() {
        let base = ov.seed.unwrap_or(cfg.seeds[0]);
        let runs = ov.runs.unwrap_or(cfg.seeds.len());
        cfg.seeds = (0..runs as u64).map(|i| base + i).collect();
    }
    cfg.output_dir = ov.output_dir.clone().unwrap_or_else(|| PathBuf::from("results")).join(preset);
    cfg.workers = ov.workers;
    if let harness::EnvSpec::Deceptive { allow_invalid_argmax, .. } = &mut cfg.env {
        *allow_invalid_argmax |= ov.allow_invalid_argmax;
    }
}
