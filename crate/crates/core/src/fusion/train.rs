//! Minibatch Adam training with dev-set model selection.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{threshold_probs, validate_threshold, FusionModel, Mode};
use crate::error::{Error, Result};
use crate::eval::{micro_prf, MetricsReport};
use crate::features::FeatureBundle;
use crate::nn::{AdamConfig, AdamState, Gradients, LossSpec, Parameterized, Rng};
use crate::vocab::LabelVector;
use crate::Example;

const SHUFFLE_STREAM: u64 = 1;
const DROPOUT_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub loss: LossSpec,
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Stop after this many epochs without a dev micro-F1 improvement.
    pub patience: Option<usize>,
    pub seed: u64,
    pub threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            loss: LossSpec::Bce,
            lr: 1e-3,
            batch_size: 16,
            epochs: 30,
            patience: Some(5),
            seed: 0,
            threshold: 0.5,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.loss.validate()?;
        validate_threshold(self.threshold)?;
        if !(self.lr.is_finite() && self.lr >= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "lr must be >= 0, got {}",
                self.lr
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidParameter("batch_size must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be positive".into()));
        }
        if self.patience == Some(0) {
            return Err(Error::InvalidParameter("patience must be positive when set".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Inference-mode mean loss over the training set after this epoch.
    pub train_loss: f64,
    /// Mean training-mode minibatch loss during this epoch.
    pub batch_loss: f64,
    pub train_f1: f64,
    pub dev_loss: Option<f64>,
    pub dev_f1: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// The best-dev model, or the final model without a dev set.
    pub model: FusionModel,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
}

/// Inference-mode loss and metrics over `examples`.
pub fn evaluate(
    model: &FusionModel,
    examples: &[Example],
    loss: &LossSpec,
    threshold: f64,
) -> Result<(f64, MetricsReport)> {
    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total = 0.0;
    let mut preds = Vec::with_capacity(examples.len());
    let mut golds = Vec::with_capacity(examples.len());
    for ex in examples {
        let probs = model.forward(&ex.bundle)?;
        total += loss.evaluate(&probs, &ex.labels.to_targets())?.0;
        preds.push(threshold_probs(&probs, threshold)?);
        golds.push(ex.labels);
    }
    Ok((total / examples.len() as f64, micro_prf(&preds, &golds)?))
}

/// Joins bundles and labels by id; every id must appear in both maps.
pub fn examples_from_maps(
    bundles: &BTreeMap<String, FeatureBundle>,
    labels: &BTreeMap<String, LabelVector>,
) -> Result<Vec<Example>> {
    if let Some(id) = labels.keys().find(|id| !bundles.contains_key(*id)) {
        return Err(Error::MissingExample(alloc::format!(
            "{id} has labels but no feature bundle"
        )));
    }
    bundles
        .iter()
        .map(|(id, b)| {
            let l = labels
                .get(id)
                .ok_or_else(|| Error::MissingExample(alloc::format!("{id} has a feature bundle but no labels")))?;
            Ok(Example {
                id: id.clone(),
                bundle: b.clone(),
                labels: *l,
            })
        })
        .collect()
}

/// Epoch-at-a-time training driver.
pub struct Trainer {
    model: FusionModel,
    adam: AdamState,
    config: TrainConfig,
    shuffle_rng: Rng,
    dropout_rng: Rng,
    grads: Gradients,
    history: Vec<EpochRecord>,
    best: Option<(f64, usize, FusionModel)>,
    since_best: usize,
}

impl Trainer {
    pub fn new(model: FusionModel, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let adam = AdamState::for_model(AdamConfig::with_lr(config.lr), &model);
        let grads = model.zero_gradients();
        Ok(Self {
            shuffle_rng: Rng::with_stream(config.seed, SHUFFLE_STREAM),
            dropout_rng: Rng::with_stream(config.seed, DROPOUT_STREAM),
            model,
            adam,
            config,
            grads,
            history: Vec::new(),
            best: None,
            since_best: 0,
        })
    }

    pub fn model(&self) -> &FusionModel {
        &self.model
    }

    pub fn history(&self) -> &[EpochRecord] {
        &self.history
    }

    pub fn should_stop(&self) -> bool {
        self.history.len() >= self.config.epochs || self.config.patience.is_some_and(|p| self.since_best >= p)
    }

    pub fn run_epoch(&mut self, train: &[Example], dev: Option<&[Example]>) -> Result<&EpochRecord> {
        if train.is_empty() || dev.is_some_and(|d| d.is_empty()) {
            return Err(Error::EmptyDataset);
        }
        let mut order: Vec<usize> = (0..train.len()).collect();
        self.shuffle_rng.shuffle(&mut order);
        let p = self.model.architecture().dropout;
        let mut batch_loss = 0.0;
        for batch in order.chunks(self.config.batch_size) {
            for g in &mut self.grads.0 {
                g.fill(0.0);
            }
            for &k in batch {
                let ex = &train[k];
                let trace = self.model.forward_trace(
                    &ex.bundle,
                    Mode::Train {
                        p,
                        rng: &mut self.dropout_rng,
                    },
                )?;
                let (l, g) = self.config.loss.evaluate(&trace.probs, &ex.labels.to_targets())?;
                batch_loss += l;
                self.model.backward(&trace, &g, &mut self.grads)?;
            }
            self.grads.scale(1.0 / batch.len() as f64);
            self.adam.step_model(&mut self.model, &self.grads)?;
            self.model.step += 1;
        }

        let (train_loss, train_m) = evaluate(&self.model, train, &self.config.loss, self.config.threshold)?;
        let dev_eval = match dev {
            Some(d) => Some(evaluate(&self.model, d, &self.config.loss, self.config.threshold)?),
            None => None,
        };
        let epoch = self.history.len() + 1;
        if let Some((_, m)) = &dev_eval {
            if self.best.as_ref().map_or(true, |b| m.micro_f1 > b.0) {
                self.best = Some((m.micro_f1, epoch, self.model.clone()));
                self.since_best = 0;
            } else {
                self.since_best += 1;
            }
        }
        self.history.push(EpochRecord {
            epoch,
            train_loss,
            batch_loss: batch_loss / train.len() as f64,
            train_f1: train_m.micro_f1,
            dev_loss: dev_eval.as_ref().map(|d| d.0),
            dev_f1: dev_eval.as_ref().map(|d| d.1.micro_f1),
        });
        log::debug!(
            "epoch {epoch}: train loss {train_loss:.5}, train F1 {:.4}, dev F1 {:?}",
            train_m.micro_f1,
            dev_eval.as_ref().map(|d| d.1.micro_f1)
        );
        Ok(self.history.last().expect("just pushed"))
    }

    pub fn finish(self) -> TrainOutcome {
        match self.best {
            Some((_, epoch, model)) => TrainOutcome {
                model,
                history: self.history,
                best_epoch: epoch,
            },
            None => TrainOutcome {
                best_epoch: self.history.len(),
                model: self.model,
                history: self.history,
            },
        }
    }
}

pub fn train(
    model: FusionModel,
    train_set: &[Example],
    dev: Option<&[Example]>,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    let mut trainer = Trainer::new(model, config.clone())?;
    while !trainer.should_stop() {
        trainer.run_epoch(train_set, dev)?;
    }
    Ok(trainer.finish())
}
