use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use stacksure::runner::{emit_report, export_csv, run_experiment, synthetic_dataset, DataMode, ExperimentConfig};
use stacksure::Error;

#[derive(Parser)]
#[command(name = "stacksure", about = "Super learning and its performance estimators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides master_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides workers.
        #[arg(long)]
        workers: Option<usize>,
        /// Overrides output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the first repeat's synthetic dataset as CSV.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the version.
    Version,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Csv { .. } => 2,
        _ => 1,
    }
}

fn load(path: &std::path::Path) -> Result<ExperimentConfig, Error> {
    ExperimentConfig::load(path, std::env::vars())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run {
            config,
            seed,
            workers,
            out,
        } => {
            let mut cfg = load(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(w) = workers {
                cfg.worker_count = w;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            let bundle = run_experiment(&cfg)?;
            let files = emit_report(&bundle, &cfg.output_dir, cfg.deterministic_reports)?;
            let undefined = bundle.records.iter().filter(|r| r.auc.is_none()).count();
            eprintln!(
                "{} records ({undefined} undefined) in {:.1} s",
                bundle.records.len(),
                bundle.metadata.total_wall_time_ms / 1e3
            );
            for f in files {
                println!("{}", f.display());
            }
            Ok(())
        }
        Command::Gen { config, out } => {
            let cfg = load(&config)?;
            if cfg.mode != DataMode::Synthetic {
                return Err(Error::Config("gen needs mode = synthetic".into()));
            }
            export_csv(&synthetic_dataset(&cfg, 0)?, &out)?;
            println!("{}", out.display());
            Ok(())
        }
        Command::Version => {
            println!("stacksure {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors count as configuration errors
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
