//! Command-line pipeline for the memefuse classifier: file formats, the run
//! configuration and one function per subcommand.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{compare, eval, featurize, predict, preprocess, train};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "memefuse",
    version,
    about = "Multimodal propaganda-technique classifier for memes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add a normalized `clean_text` field to every record.
    Preprocess {
        #[arg(long)]
        dataset: PathBuf,
        /// Contraction dictionary (TSV); the shipped one by default.
        #[arg(long)]
        dict: Option<PathBuf>,
        /// Ranked word list for hashtag segmentation.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Run config; only its `preprocess` section is read.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract baseline (T, H, I) bundles into a feature archive.
    Featurize {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        images_dir: PathBuf,
        /// Run config; its `features` section and `training.dims` are read.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_archive: PathBuf,
        /// Also write augmented bundles for minority-class records.
        #[arg(long)]
        augment: bool,
    },
    /// Train the configured topology.
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Micro precision, recall and F1 of a checkpoint on a labelled archive.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        archive: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = eval::DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-record label predictions.
    Predict {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        archive: PathBuf,
        #[arg(long, default_value_t = eval::DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train several topologies and compare them on the test split.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "concat,early,late,mfas")]
        topologies: String,
    },
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Preprocess {
            dataset,
            dict,
            lexicon,
            config,
            out,
        } => preprocess::run(&preprocess::PreprocessArgs {
            dataset,
            dict,
            lexicon,
            config,
            out,
        }),
        Command::Featurize {
            dataset,
            images_dir,
            config,
            out_archive,
            augment,
        } => featurize::run(&featurize::FeaturizeArgs {
            dataset,
            images_dir,
            config,
            out_archive,
            augment,
        }),
        Command::Train { config } => train::run(&config),
        Command::Eval {
            checkpoint,
            archive,
            dataset,
            threshold,
            out,
        } => eval::run(&eval::EvalArgs {
            checkpoint,
            archive,
            dataset,
            threshold,
            out,
        }),
        Command::Predict {
            checkpoint,
            archive,
            threshold,
            out,
        } => predict::run(&predict::PredictArgs {
            checkpoint,
            archive,
            threshold,
            out,
        }),
        Command::Compare { config, topologies } => {
            let list = compare::parse_topologies(&topologies)?;
            compare::run(&config, &list)
        }
    }
}
