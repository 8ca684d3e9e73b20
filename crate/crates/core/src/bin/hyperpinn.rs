use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyperpinn::experiment::{self, EvalSummary, ExperimentConfig};
use hyperpinn::models::architecture;
use hyperpinn::optim::TrainStatus;
use hyperpinn::Result;

#[derive(Parser)]
#[command(name = "hyperpinn", version, about = "Hypernetwork-generated PINNs for Burgers and Lorenz")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (flat `key = value` file).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides the config's `seed`.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Overrides the config's `workdir`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the dataset (and Burgers reference solutions).
    Generate {
        #[command(flatten)]
        common: Common,
        /// Overwrite existing data files.
        #[arg(long)]
        force: bool,
    },
    /// Train the configured model.
    Train {
        #[command(flatten)]
        common: Common,
    },
    /// Score a trained model and export plot data.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Model file to evaluate instead of the configured one.
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
    },
    /// Time single predictions of trained models.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Model files to time (default: every trained model of the problem).
        #[arg(long = "model", value_name = "PATH")]
        models: Vec<PathBuf>,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.training.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.workdir = out.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { common, force } => {
            let cfg = load(&common)?;
            for p in experiment::generate(&cfg, force)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Train { common } => {
            let cfg = load(&common)?;
            let hint = common.config.display().to_string();
            let arch = architecture(cfg.problem, cfg.model);
            println!(
                "{}/{}: evaluated network {} has {} parameters; {} trainable",
                cfg.problem,
                cfg.model,
                arch.evaluated_spec(),
                arch.evaluated_spec().param_count(),
                arch.trainable_count()
            );
            let s = experiment::train_command(&cfg, &hint)?;
            let last = s.outcome.final_row().map_or(f64::NAN, |r| r.total_loss);
            println!(
                "initial loss {:.6e}, final batch loss {last:.6e}, best batch loss {:.6e}",
                s.outcome.initial_loss, s.outcome.best_loss
            );
            if let TrainStatus::Aborted { iteration, reason } = &s.outcome.status {
                println!("training stopped at iteration {iteration}: {reason}");
            }
            println!("wrote {}", s.model_path.display());
            println!("wrote {}", s.history_path.display());
        }
        Command::Evaluate { common, model } => {
            let cfg = load(&common)?;
            let hint = common.config.display().to_string();
            match experiment::evaluate_command(&cfg, model.as_deref(), &hint)? {
                EvalSummary::Burgers {
                    model,
                    mean_mse,
                    per_nu,
                    report,
                    plot,
                } => {
                    for e in &per_nu {
                        println!("{model} nu={:<7} mse={:.4e} max_error={:.4e}", e.nu, e.mse, e.max_error);
                    }
                    println!("{model} mean mse {mean_mse:.4e}");
                    println!("wrote {}", report.display());
                    println!("wrote {}", plot.display());
                }
                EvalSummary::Lorenz {
                    model,
                    report,
                    report_path,
                    plot,
                } => {
                    println!(
                        "{model} aggregate rollout error {:.4} over {} trajectories ({} blew up)",
                        report.aggregate,
                        report.scores.len(),
                        report.blow_ups()
                    );
                    println!("wrote {}", report_path.display());
                    println!("wrote {}", plot.display());
                }
            }
        }
        Command::Bench { common, models } => {
            let cfg = load(&common)?;
            let hint = common.config.display().to_string();
            let (rows, path) = experiment::bench_command(&cfg, &models, &hint)?;
            for r in &rows {
                println!(
                    "{:<15} {:<5} median {:>9.3} us  p10 {:>9.3}  p90 {:>9.3}  {:>12.0} points/s",
                    r.model, r.component, r.median_us, r.p10_us, r.p90_us, r.throughput_per_s
                );
            }
            if let Some(r) = rows.first() {
                println!("hardware: {}", r.hardware);
            }
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
