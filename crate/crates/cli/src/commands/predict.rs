use std::path::PathBuf;

use memefuse_core::fusion::{threshold_probs, validate_threshold};
use memefuse_core::LabelVocabulary;
use serde::Serialize;

use super::eval::load_model_and_archive;
use crate::error::{CliError, CliResult, Context};
use crate::io;

#[derive(Debug, Clone)]
pub struct PredictArgs {
    pub checkpoint: PathBuf,
    pub archive: PathBuf,
    pub threshold: f64,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Prediction {
    pub id: String,
    pub labels: Vec<String>,
    pub probabilities: Vec<f64>,
}

pub fn predictions(args: &PredictArgs) -> CliResult<Vec<Prediction>> {
    validate_threshold(args.threshold).context("--threshold")?;
    let (model, archive) = load_model_and_archive(&args.checkpoint, &args.archive)?;
    let vocab = LabelVocabulary::canonical();
    archive
        .bundles()
        .iter()
        .map(|(id, bundle)| {
            let probs = model.forward(bundle).map_err(CliError::internal)?;
            let labels = threshold_probs(&probs, args.threshold)
                .map_err(CliError::internal)?
                .indices()
                .filter_map(|c| vocab.name(c).map(String::from))
                .collect();
            Ok(Prediction {
                id: id.clone(),
                labels,
                probabilities: probs,
            })
        })
        .collect()
}

pub fn run(args: &PredictArgs) -> CliResult<()> {
    let preds = predictions(args)?;
    match &args.out {
        Some(out) => io::write_json(out, &preds),
        None => {
            println!("{}", serde_json::to_string_pretty(&preds).map_err(CliError::internal)?);
            Ok(())
        }
    }
}
