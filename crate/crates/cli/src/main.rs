use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use tabstack::SeedSpec;
use tabstack_bench::{load_results, model_zoo, run_benchmark, select_models, train_model, write_artifacts, ModelArtifact, RunConfig};

#[derive(Parser)]
#[command(name = "tabstack", version, about = "Stacked tree ensembles and a multi-dataset benchmark")]
struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Table,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// List the available models.
    Models {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Evaluate models on every dataset of a registry and rank them.
    Bench {
        #[arg(long)]
        registry: PathBuf,
        /// Comma-separated model ids, or `all`.
        #[arg(long, default_value = "all")]
        models: String,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        /// Base seed; drawn from entropy (and logged) when omitted.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Render a results file written by `bench`.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Fit a model on a CSV file and save it.
    Train {
        #[arg(long)]
        model: String,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Predict one label per row of a CSV file with a saved model.
    Predict {
        #[arg(long)]
        model_file: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Write labels here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const PARTIAL_FAILURE: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn execute(command: Command) -> Result<ExitCode> {
    let mut stdout = std::io::stdout().lock();
    match command {
        Command::Models { format } => {
            let zoo = model_zoo();
            match format {
                Format::Table => {
                    for entry in &zoo {
                        writeln!(stdout, "{:<20} {:<9} {}", entry.id, entry.generator, entry.build().hyperparameters())?;
                    }
                }
                Format::Machine => {
                    let listing: Vec<_> = zoo
                        .iter()
                        .map(|e| json!({ "id": e.id, "generator": e.generator, "hyperparameters": e.build().hyperparameters() }))
                        .collect();
                    writeln!(stdout, "{}", serde_json::to_string_pretty(&listing)?)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            registry,
            models,
            folds,
            seed,
            out,
            workers,
            format,
        } => {
            let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let config = RunConfig {
                registry,
                models: select_models(&models)?,
                folds,
                seed: SeedSpec(seed),
                workers,
            };
            let (results, meta) = run_benchmark(&config)?;
            write_artifacts(&results, &meta, &out).with_context(|| format!("writing artifacts to {}", out.display()))?;
            match format {
                Format::Table => write!(stdout, "{}", tabstack_bench::run::render_report(&results))?,
                Format::Machine => write!(stdout, "{}", results.to_json())?,
            }
            if results.is_complete() {
                Ok(ExitCode::SUCCESS)
            } else {
                for c in results.failures() {
                    eprintln!("failed: {} on {}", c.model, c.dataset);
                }
                Ok(ExitCode::from(PARTIAL_FAILURE))
            }
        }
        Command::Report { input, format } => {
            let results = load_results(&input)?;
            match format {
                Format::Table => write!(stdout, "{}", tabstack_bench::run::render_report(&results))?,
                Format::Machine => write!(stdout, "{}", results.to_json())?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Train {
            model,
            data,
            target,
            out,
            seed,
        } => {
            let artifact = train_model(&model, &data, &target, SeedSpec(seed))?;
            artifact.save(&out)?;
            eprintln!("saved {} to {}", model, out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Predict { model_file, data, out } => {
            let artifact = ModelArtifact::load(&model_file)?;
            let mut text = artifact.predict_csv(&data)?.join("\n");
            text.push('\n');
            match out {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => stdout.write_all(text.as_bytes())?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
