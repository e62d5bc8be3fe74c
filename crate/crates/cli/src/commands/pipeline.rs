//! Loading splits and fitting one topology; shared by `train` and `compare`.

use std::path::Path;

use memefuse_core::dataset::{class_weights, SplitStats, WeightScheme};
use memefuse_core::features::BundleDims;
use memefuse_core::fusion::train::examples_from_maps;
use memefuse_core::fusion::{checkpoint, train, EpochRecord, FusionModel, Topology, TrainOutcome};
use memefuse_core::nn::LossSpec;
use memefuse_core::{imbalance, Example, LabelVocabulary};
use serde::Serialize;

use crate::config::{Imbalance, RunConfig, SplitPaths};
use crate::error::{CliError, CliResult, Context};
use crate::io;

pub struct Splits {
    pub dims: BundleDims,
    pub train: Vec<Example>,
    pub dev: Option<Vec<Example>>,
    pub test: Option<Vec<Example>>,
}

fn load_split(paths: &SplitPaths, vocab: &LabelVocabulary) -> CliResult<(BundleDims, Vec<Example>)> {
    let records = io::load_dataset(&paths.dataset, vocab)?;
    let archive = io::load_archive(&paths.archive)?;
    let labels = io::labels_for_archive(&archive, &records).map_err(|e| {
        CliError::usage(format!(
            "{} with {}: {e}",
            paths.archive.display(),
            paths.dataset.display()
        ))
    })?;
    let examples = examples_from_maps(archive.bundles(), &labels).context(paths.archive.display())?;
    Ok((archive.dims(), examples))
}

/// Loads every configured split and checks that their dims agree with each
/// other and with `training.dims`.
pub fn load_splits(cfg: &RunConfig, need_test: bool) -> CliResult<Splits> {
    let (train_paths, dev_paths, test_paths) = cfg.require_inputs(need_test)?;
    let vocab = LabelVocabulary::canonical();
    let (dims, train) = load_split(train_paths, &vocab)?;
    if train.is_empty() {
        return Err(CliError::usage(format!(
            "training split {} is empty",
            train_paths.archive.display()
        )));
    }
    if let Some(expected) = cfg.training.expected_dims() {
        if expected != dims {
            return Err(CliError::usage(format!(
                "training.dims {expected} do not match archive {} dims {dims}",
                train_paths.archive.display()
            )));
        }
    }
    let other = |p: Option<&SplitPaths>| -> CliResult<Option<Vec<Example>>> {
        let Some(p) = p else { return Ok(None) };
        let (d, ex) = load_split(p, &vocab)?;
        if d != dims {
            return Err(CliError::usage(format!(
                "archive {} has dims {d} but the training archive has {dims}",
                p.archive.display()
            )));
        }
        Ok(Some(ex))
    };
    let dev = other(dev_paths)?;
    let test = other(test_paths)?;
    Ok(Splits { dims, train, dev, test })
}

/// Applies the configured imbalance remedy: resampling changes the training
/// set, class weights change the loss.
pub fn prepare_training(cfg: &RunConfig, train_set: &[Example]) -> CliResult<(Vec<Example>, LossSpec)> {
    let t = &cfg.training;
    match &t.imbalance {
        Imbalance::None => Ok((train_set.to_vec(), t.loss.clone())),
        Imbalance::ClassWeights => {
            let stats = SplitStats::from_label_vectors(train_set.iter().map(|e| &e.labels));
            let w = class_weights(&stats, WeightScheme::Balanced).context("class weights")?;
            Ok((train_set.to_vec(), LossSpec::WeightedBce { weights: w.to_vec() }))
        }
        Imbalance::Resample(r) => {
            let out = imbalance::apply(train_set, r).context("training.imbalance")?;
            log::info!(
                "resampled training set from {} to {} examples",
                train_set.len(),
                out.len()
            );
            Ok((out, t.loss.clone()))
        }
    }
}

pub fn fit(cfg: &RunConfig, topology: Topology, splits: &Splits) -> CliResult<TrainOutcome> {
    let t = &cfg.training;
    let (train_set, loss) = prepare_training(cfg, &splits.train)?;
    let mut train_cfg = t.train_config();
    train_cfg.loss = loss;
    let model = FusionModel::build(topology, splits.dims, t.architecture.clone(), t.seed).context("model")?;
    log::info!(
        "training {topology} on {} examples for up to {} epochs",
        train_set.len(),
        train_cfg.epochs
    );
    train(model, &train_set, splits.dev.as_deref(), &train_cfg).map_err(CliError::internal)
}

#[derive(Serialize)]
struct History<'a> {
    topology: Topology,
    best_epoch: usize,
    epochs: &'a [EpochRecord],
}

pub fn write_outcome(outcome: &TrainOutcome, checkpoint_path: &Path, history_path: &Path) -> CliResult<()> {
    let bytes = checkpoint::encode(&outcome.model).map_err(CliError::internal)?;
    io::write_bytes(checkpoint_path, &bytes)?;
    io::write_json(
        history_path,
        &History {
            topology: outcome.model.topology(),
            best_epoch: outcome.best_epoch,
            epochs: &outcome.history,
        },
    )
}

/// Creates the output directory up front so an unwritable location fails
/// before training starts.
pub fn prepare_output_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let probe = dir.join(".write-test");
    std::fs::write(&probe, b"").map_err(|e| CliError::io(dir, e))?;
    std::fs::remove_file(&probe).map_err(|e| CliError::io(&probe, e))
}
