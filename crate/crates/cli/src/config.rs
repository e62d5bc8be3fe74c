//! The JSON run configuration shared by every command.
//!
//! Relative paths are resolved against the directory holding the config
//! file. Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use memefuse_core::features::baseline::{hidden_dim, prediction_dim};
use memefuse_core::features::{Augmentation, BundleDims, HashedNgramConfig, MODEL_INPUT_SIDE};
use memefuse_core::fusion::{Architecture, Topology, TrainConfig};
use memefuse_core::imbalance::{ResampleConfig, DEFAULT_COUNT_THRESHOLD};
use memefuse_core::nn::LossSpec;
use memefuse_core::text::PreprocessConfig;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, CliResult, Context};
use crate::io;

pub const CONFIG_VERSION: u32 = 1;

/// Images are fed to the baseline extractor as RGB; grayscale inputs are
/// replicated across channels.
pub const IMAGE_CHANNELS: usize = 3;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default)]
    pub preprocess: PreprocessConfig,
    #[serde(default)]
    pub features: FeatureSettings,
    #[serde(default)]
    pub data: DataPaths,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub training: TrainingSettings,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPaths {
    pub train: Option<SplitPaths>,
    pub dev: Option<SplitPaths>,
    pub test: Option<SplitPaths>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitPaths {
    pub dataset: PathBuf,
    pub archive: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSettings {
    pub text: HashedNgramConfig,
    /// Side of the square the image is resized to before feature extraction.
    pub image_side: usize,
    /// Corpus for IDF statistics under `tfidf`; defaults to the dataset
    /// being featurized.
    pub fit_dataset: Option<PathBuf>,
    pub augment: Option<AugmentSettings>,
}

impl Default for FeatureSettings {
    fn default() -> Self {
        Self {
            text: HashedNgramConfig::default(),
            image_side: MODEL_INPUT_SIDE,
            fit_dataset: None,
            augment: None,
        }
    }
}

impl FeatureSettings {
    pub fn dims(&self) -> BundleDims {
        BundleDims::new(
            self.text.dim,
            hidden_dim(IMAGE_CHANNELS),
            prediction_dim(IMAGE_CHANNELS),
        )
    }
}

/// Image augmentation for minority-class records.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentSettings {
    pub ops: Vec<Augmentation>,
    #[serde(default)]
    pub target_labels: Option<Vec<usize>>,
    #[serde(default = "default_count_threshold")]
    pub count_threshold: usize,
}

fn default_count_threshold() -> usize {
    DEFAULT_COUNT_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingSettings {
    pub topology: Topology,
    pub loss: LossSpec,
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub patience: Option<usize>,
    pub seed: u64,
    pub threshold: f64,
    /// Expected bundle dims `[d_t, d_h, d_i]`; checked against the archives.
    pub dims: Option<[usize; 3]>,
    pub architecture: Architecture,
    pub imbalance: Imbalance,
}

impl Default for TrainingSettings {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            topology: Topology::Mfas,
            loss: t.loss,
            lr: t.lr,
            batch_size: t.batch_size,
            epochs: t.epochs,
            patience: t.patience,
            seed: t.seed,
            threshold: t.threshold,
            dims: None,
            architecture: Architecture::default(),
            imbalance: Imbalance::None,
        }
    }
}

impl TrainingSettings {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            loss: self.loss.clone(),
            lr: self.lr,
            batch_size: self.batch_size,
            epochs: self.epochs,
            patience: self.patience,
            seed: self.seed,
            threshold: self.threshold,
        }
    }

    pub fn expected_dims(&self) -> Option<BundleDims> {
        self.dims.map(|[t, h, i]| BundleDims::new(t, h, i))
    }
}

/// Written as `{"kind": "none" | "class_weights" | "oversample" | "smote" |
/// "tomek" | "near_miss", ...}`; resampling kinds take the remaining
/// [`ResampleConfig`] keys at the same level.
#[derive(Debug, Clone, Default, PartialEq)]
pub enum Imbalance {
    #[default]
    None,
    ClassWeights,
    Resample(ResampleConfig),
}

impl<'de> Deserialize<'de> for Imbalance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let mut obj = match Value::deserialize(d)? {
            Value::Object(m) => m,
            Value::String(s) => [("kind".to_string(), Value::String(s))].into_iter().collect(),
            other => return Err(D::Error::custom(format!("imbalance must be an object, got {other}"))),
        };
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| D::Error::custom("imbalance needs a string \"kind\""))?
            .to_string();
        let simple = match kind.as_str() {
            "none" => Some(Imbalance::None),
            "class_weights" => Some(Imbalance::ClassWeights),
            _ => None,
        };
        if let Some(v) = simple {
            if let Some(extra) = obj.keys().find(|k| *k != "kind") {
                return Err(D::Error::custom(format!(
                    "imbalance kind {kind:?} takes no field {extra:?}"
                )));
            }
            return Ok(v);
        }
        let mut method = serde_json::Map::new();
        for key in ["kind", "k", "version"] {
            if let Some(v) = obj.remove(key) {
                method.insert(key.to_string(), v);
            }
        }
        obj.insert("method".into(), Value::Object(method));
        serde_json::from_value(Value::Object(obj))
            .map(Imbalance::Resample)
            .map_err(|e| D::Error::custom(format!("imbalance: {e}")))
    }
}

impl RunConfig {
    /// Parses and validates every setting that needs no file access.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = io::read_text(path)?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        if cfg.version != CONFIG_VERSION {
            return Err(CliError::usage(format!(
                "config {}: unsupported version {} (expected {CONFIG_VERSION})",
                path.display(),
                cfg.version
            )));
        }
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve(base);
        cfg.validate().map_err(|e| match e {
            CliError::Core { context, source } => CliError::Core {
                context: format!("config {}: {context}", path.display()),
                source,
            },
            other => other,
        })?;
        Ok(cfg)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        if let Some(p) = &mut self.features.fit_dataset {
            fix(p);
        }
        for split in [&mut self.data.train, &mut self.data.dev, &mut self.data.test]
            .into_iter()
            .flatten()
        {
            fix(&mut split.dataset);
            fix(&mut split.archive);
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        self.features.text.validate().context("features.text")?;
        if self.features.image_side == 0 {
            return Err(CliError::usage("features.image_side must be positive"));
        }
        if let Some(a) = &self.features.augment {
            if a.ops.is_empty() {
                return Err(CliError::usage("features.augment.ops must not be empty"));
            }
        }
        let t = &self.training;
        t.train_config().validate().context("training")?;
        t.architecture.validate().context("training.architecture")?;
        if let Some(d) = t.expected_dims() {
            d.validate().context("training.dims")?;
            let produced = self.features.dims();
            if d != produced {
                return Err(CliError::usage(format!(
                    "training.dims {d} conflict with the dims {produced} produced by the feature settings"
                )));
            }
        }
        match &t.imbalance {
            Imbalance::Resample(r) => r.validate().context("training.imbalance")?,
            Imbalance::ClassWeights if !matches!(t.loss, LossSpec::Bce) => {
                return Err(CliError::usage(
                    "training.imbalance class_weights derives the weights itself and needs loss kind \"bce\"",
                ))
            }
            _ => {}
        }
        Ok(())
    }

    /// Checks that the inputs a training run reads exist.
    pub fn require_inputs(
        &self,
        need_test: bool,
    ) -> CliResult<(&SplitPaths, Option<&SplitPaths>, Option<&SplitPaths>)> {
        let train = self
            .data
            .train
            .as_ref()
            .ok_or_else(|| CliError::usage("config has no data.train split"))?;
        if need_test && self.data.test.is_none() {
            return Err(CliError::usage("config has no data.test split"));
        }
        for split in [Some(train), self.data.dev.as_ref(), self.data.test.as_ref()]
            .into_iter()
            .flatten()
        {
            for p in [&split.dataset, &split.archive] {
                if !p.is_file() {
                    return Err(CliError::usage(format!("input file {} does not exist", p.display())));
                }
            }
        }
        Ok((train, self.data.dev.as_ref(), self.data.test.as_ref()))
    }
}
