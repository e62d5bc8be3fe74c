use std::path::{Path, PathBuf};

use memefuse_core::eval::{micro_prf, MetricsReport};
use memefuse_core::features::FeatureArchive;
use memefuse_core::fusion::train::examples_from_maps;
use memefuse_core::fusion::{validate_threshold, FusionModel, Topology};
use memefuse_core::LabelVocabulary;
use serde::Serialize;

use crate::error::{CliError, CliResult, Context};
use crate::io;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct EvalArgs {
    pub checkpoint: PathBuf,
    pub archive: PathBuf,
    pub dataset: PathBuf,
    pub threshold: f64,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub topology: Topology,
    pub threshold: f64,
    pub metrics: MetricsReport,
}

/// Loads a checkpoint and an archive, refusing mismatched dims.
pub fn load_model_and_archive(checkpoint: &Path, archive: &Path) -> CliResult<(FusionModel, FeatureArchive)> {
    let model = io::load_checkpoint(checkpoint)?;
    let archive_data = io::load_archive(archive)?;
    if model.dims() != archive_data.dims() {
        return Err(CliError::usage(format!(
            "checkpoint {} expects dims {} but archive {} has dims {}",
            checkpoint.display(),
            model.dims(),
            archive.display(),
            archive_data.dims()
        )));
    }
    Ok((model, archive_data))
}

pub fn evaluate(args: &EvalArgs) -> CliResult<EvalReport> {
    validate_threshold(args.threshold).context("--threshold")?;
    let (model, archive) = load_model_and_archive(&args.checkpoint, &args.archive)?;
    let records = io::load_dataset(&args.dataset, &LabelVocabulary::canonical())?;
    let labels = io::labels_for_archive(&archive, &records)?;
    let examples = examples_from_maps(archive.bundles(), &labels).context(args.archive.display())?;
    if examples.is_empty() {
        return Err(CliError::usage(format!("archive {} is empty", args.archive.display())));
    }
    let mut preds = Vec::with_capacity(examples.len());
    for ex in &examples {
        preds.push(model.predict(&ex.bundle, args.threshold).map_err(CliError::internal)?);
    }
    let golds: Vec<_> = examples.iter().map(|e| e.labels).collect();
    let metrics = micro_prf(&preds, &golds).map_err(CliError::internal)?;
    Ok(EvalReport {
        topology: model.topology(),
        threshold: args.threshold,
        metrics,
    })
}

/// Prints the report as JSON and writes it to `--out` when given.
pub fn run(args: &EvalArgs) -> CliResult<()> {
    let report = evaluate(args)?;
    println!("{}", serde_json::to_string_pretty(&report).map_err(CliError::internal)?);
    if let Some(out) = &args.out {
        io::write_json(out, &report)?;
    }
    Ok(())
}
