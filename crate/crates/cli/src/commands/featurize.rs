use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use memefuse_core::dataset::{split_stats, MemeRecord};
use memefuse_core::features::{
    augment_image, baseline_image_features, resize_image, FeatureArchive, FeatureBundle, HashedVectorizer, ImageMatrix,
};
use memefuse_core::LabelVocabulary;
use serde_json::json;

use crate::config::{AugmentSettings, FeatureSettings, RunConfig, IMAGE_CHANNELS};
use crate::error::{CliError, CliResult, Context};
use crate::io::{self, AUGMENT_MARKER};

#[derive(Debug, Clone)]
pub struct FeaturizeArgs {
    pub dataset: PathBuf,
    pub images_dir: PathBuf,
    pub config: Option<PathBuf>,
    pub out_archive: PathBuf,
    /// Add augmented copies of minority-class records.
    pub augment: bool,
}

pub fn run(args: &FeaturizeArgs) -> CliResult<()> {
    let (settings, expected) = match &args.config {
        Some(p) => {
            let cfg = RunConfig::load(p)?;
            let dims = cfg.training.expected_dims();
            (cfg.features, dims)
        }
        None => (FeatureSettings::default(), None),
    };
    let dims = settings.dims();
    if let Some(e) = expected {
        if e != dims {
            return Err(CliError::usage(format!(
                "configured dims {e} differ from featurizer dims {dims}"
            )));
        }
    }
    let augment = match (args.augment, &settings.augment) {
        (false, _) => None,
        (true, Some(a)) => Some(a),
        (true, None) => {
            return Err(CliError::usage(
                "--augment needs a features.augment section in the config",
            ))
        }
    };

    let vocab = LabelVocabulary::canonical();
    let records = io::load_dataset(&args.dataset, &vocab)?;
    let image_paths: Vec<PathBuf> = records.iter().map(|r| args.images_dir.join(&r.image_ref)).collect();
    if let Some((r, p)) = records.iter().zip(&image_paths).find(|(_, p)| !p.is_file()) {
        return Err(CliError::usage(format!(
            "record {}: image {} not found",
            r.id,
            p.display()
        )));
    }

    let vectorizer = fit_vectorizer(&settings, &records, &vocab)?;
    let targets = augment.map(|a| augment_targets(a, &records)).unwrap_or_default();

    let mut bundles = BTreeMap::new();
    for (record, path) in records.iter().zip(&image_paths) {
        let text: Vec<f32> = vectorizer
            .transform(record.model_text())
            .iter()
            .map(|&v| v as f32)
            .collect();
        let image = to_rgb(&io::load_image(path)?).context(format!("record {}", record.id))?;
        bundles.insert(
            record.id.clone(),
            bundle(&text, &image, settings.image_side, &record.id)?,
        );
        if let Some(a) = augment.filter(|_| record.labels.iter().any(|l| targets.contains(l))) {
            for (k, op) in a.ops.iter().enumerate() {
                let id = format!("{}{AUGMENT_MARKER}{k}", record.id);
                let img = augment_image(&image, *op).context(format!("record {}: augmentation {k}", record.id))?;
                bundles.insert(id.clone(), bundle(&text, &img, settings.image_side, &id)?);
            }
        }
    }

    let n = bundles.len();
    let provenance = json!({
        "extractor": "baseline",
        "text": settings.text,
        "image_side": settings.image_side,
        "augment": augment.map(|a| a.ops.len()).unwrap_or(0),
    });
    let archive = FeatureArchive::new(dims, bundles)
        .context("feature archive")?
        .with_provenance(provenance);
    io::write_bytes(&args.out_archive, &archive.encode().context("feature archive")?)?;
    log::info!("wrote {n} bundles with dims {dims} to {}", args.out_archive.display());
    Ok(())
}

fn fit_vectorizer(
    settings: &FeatureSettings,
    records: &[MemeRecord],
    vocab: &LabelVocabulary,
) -> CliResult<HashedVectorizer> {
    let fitted;
    let corpus = match &settings.fit_dataset {
        Some(p) => {
            fitted = io::load_dataset(p, vocab)?;
            &fitted[..]
        }
        None => records,
    };
    HashedVectorizer::fit(settings.text, corpus.iter().map(|r| r.model_text())).context("features.text")
}

fn augment_targets(a: &AugmentSettings, records: &[MemeRecord]) -> BTreeSet<usize> {
    match &a.target_labels {
        Some(t) => t.iter().copied().collect(),
        None => {
            let stats = split_stats(records);
            (0..stats.per_class_counts.len())
                .filter(|&c| (1..a.count_threshold).contains(&stats.per_class_counts[c]))
                .collect()
        }
    }
}

fn to_rgb(img: &ImageMatrix) -> memefuse_core::Result<ImageMatrix> {
    if img.channels() == IMAGE_CHANNELS {
        return Ok(img.clone());
    }
    ImageMatrix::from_fn(img.height(), img.width(), IMAGE_CHANNELS, |y, x, _| img.get(y, x, 0))
}

fn bundle(text: &[f32], image: &ImageMatrix, side: usize, id: &str) -> CliResult<FeatureBundle> {
    let resized = resize_image(image, side, side).context(format!("record {id}"))?;
    let (h, i) = baseline_image_features(&resized).context(format!("record {id}"))?;
    FeatureBundle::new(text.to_vec(), h, i).context(format!("record {id}"))
}
