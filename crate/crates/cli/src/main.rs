use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use radiomics_crbm::pipeline::{cmd_extract, cmd_run, cmd_synth, cmd_train_crbm, PipelineConfig, SynthSpec};
use radiomics_crbm::Error;

#[derive(Parser)]
#[command(name = "radiomics-crbm", version, about = "CRBM and radiomics features for binary response prediction")]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic two-texture corpus (images, masks, manifest.csv).
    Synth {
        /// TOML synthetic-corpus spec; defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the CRBM; writes the model and `<stem>.history.csv`.
    TrainCrbm {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the per-sample feature CSV.
    Extract {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Trained CRBM, required for CRBM feature sources.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Cross-validate the pipeline; writes the report and `<stem>.roc.csv`.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Use this CRBM instead of training one.
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn pipeline_config(path: Option<&Path>) -> Result<PipelineConfig, Failure> {
    match path {
        Some(p) => PipelineConfig::load(p).map_err(|e| Failure::Usage(e.to_string())),
        None => Ok(PipelineConfig::default()),
    }
}

fn synth_spec(path: Option<&Path>) -> Result<SynthSpec, Failure> {
    let Some(p) = path else {
        return Ok(SynthSpec::default());
    };
    let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    let spec: SynthSpec = toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    spec.validate()?;
    Ok(spec)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Synth { config, out } => {
            let spec = synth_spec(config.as_deref())?;
            let ds = cmd_synth(&spec, &out)?;
            let (pos, neg) = ds.class_counts();
            println!("wrote {} samples ({pos} positive, {neg} negative) to {}", ds.len(), out.display());
        }
        Command::TrainCrbm { config, manifest, out } => {
            let cfg = pipeline_config(config.as_deref())?;
            let history = cmd_train_crbm(&cfg, &manifest, &out)?;
            if let Some(last) = history.epochs.last() {
                println!(
                    "trained {} epochs, final reconstruction cross-entropy {:.6}",
                    history.epochs.len(),
                    last.reconstruction_cross_entropy
                );
            }
        }
        Command::Extract { config, manifest, out, model } => {
            let cfg = pipeline_config(config.as_deref())?;
            cmd_extract(&cfg, &manifest, model.as_deref(), &out)?;
            println!("wrote {}", out.display());
        }
        Command::Run { config, manifest, out, model } => {
            let cfg = pipeline_config(config.as_deref())?;
            let r = cmd_run(&cfg, &manifest, model.as_deref(), &out)?.evaluation;
            println!(
                "auc {:.4}  accuracy {:.4}  sensitivity {:.4}  specificity {:.4}  (n = {})",
                r.auc, r.accuracy, r.sensitivity, r.specificity, r.n_samples
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
