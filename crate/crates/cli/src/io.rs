//! File access for datasets, archives, checkpoints and images.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use memefuse_core::dataset::{binarize, parse_dataset, MemeRecord};
use memefuse_core::features::{netpbm, FeatureArchive, ImageMatrix};
use memefuse_core::fusion::{checkpoint, FusionModel};
use memefuse_core::{LabelVector, LabelVocabulary};
use serde::Serialize;

use crate::error::{CliError, CliResult, Context};

/// Suffix marking augmented copies of a record in an archive.
pub const AUGMENT_MARKER: &str = "#aug";

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::internal)?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn load_dataset(path: &Path, vocab: &LabelVocabulary) -> CliResult<Vec<MemeRecord>> {
    parse_dataset(&read_text(path)?, vocab).context(format!("dataset {}", path.display()))
}

pub fn load_archive(path: &Path) -> CliResult<FeatureArchive> {
    FeatureArchive::decode(&read_bytes(path)?).context(format!("archive {}", path.display()))
}

pub fn load_checkpoint(path: &Path) -> CliResult<FusionModel> {
    checkpoint::decode(&read_bytes(path)?).context(format!("checkpoint {}", path.display()))
}

pub fn load_image(path: &Path) -> CliResult<ImageMatrix> {
    netpbm::decode(&read_bytes(path)?).context(format!("image {}", path.display()))
}

/// Gold labels for every archive id. Augmented ids (`<id>#aug<n>`) take
/// the labels of their source record.
pub fn labels_for_archive(
    archive: &FeatureArchive,
    records: &[MemeRecord],
) -> CliResult<BTreeMap<String, LabelVector>> {
    let by_id: BTreeMap<&str, LabelVector> = records.iter().map(|r| (r.id.as_str(), binarize(r))).collect();
    let mut out = BTreeMap::new();
    for id in archive.bundles().keys() {
        let base = id.split_once(AUGMENT_MARKER).map_or(id.as_str(), |(b, _)| b);
        let labels = by_id
            .get(base)
            .ok_or_else(|| CliError::usage(format!("archive id {id:?} has no record in the dataset")))?;
        out.insert(id.clone(), *labels);
    }
    if let Some(r) = records.iter().find(|r| archive.get(&r.id).is_none()) {
        return Err(CliError::usage(format!(
            "record {:?} has no feature bundle in the archive",
            r.id
        )));
    }
    Ok(out)
}
