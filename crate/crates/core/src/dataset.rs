//! Multi-label meme records, per-class statistics and class weights.
//!
//! The on-disk form is a JSON array of objects with the fields `id`
//! (string), `text` (string), `image` (string, relative path) and `labels`
//! (array of technique names). An optional `clean_text` string is carried
//! through when present; any other field is ignored.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::vocab::{LabelVector, LabelVocabulary, NUM_LABELS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemeRecord {
    pub id: String,
    pub text: String,
    pub image_ref: String,
    pub labels: BTreeSet<usize>,
    pub clean_text: Option<String>,
}

impl MemeRecord {
    /// Normalized text when the record has been preprocessed, else the raw text.
    pub fn model_text(&self) -> &str {
        self.clean_text.as_deref().unwrap_or(&self.text)
    }
}

#[derive(Deserialize)]
struct RawRecord {
    id: serde_json::Value,
    text: String,
    image: String,
    labels: Vec<String>,
    #[serde(default)]
    clean_text: Option<String>,
}

/// Parses a dataset document. Order is preserved.
pub fn parse_dataset(json: &str, vocab: &LabelVocabulary) -> Result<Vec<MemeRecord>> {
    let raw: Vec<RawRecord> = serde_json::from_str(json)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for r in raw {
        let id = match r.id {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            other => {
                return Err(Error::InvalidRecord {
                    id: other.to_string(),
                    reason: "id must be a string".into(),
                })
            }
        };
        if id.is_empty() {
            return Err(Error::InvalidRecord {
                id,
                reason: "empty id".into(),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        let mut labels = BTreeSet::new();
        for name in &r.labels {
            let idx = vocab.index(name).ok_or_else(|| Error::UnknownLabel {
                id: id.clone(),
                name: name.clone(),
            })?;
            labels.insert(idx);
        }
        out.push(MemeRecord {
            id,
            text: r.text,
            image_ref: r.image,
            labels,
            clean_text: r.clean_text,
        });
    }
    Ok(out)
}

pub fn binarize(record: &MemeRecord) -> LabelVector {
    LabelVector::from_indices(record.labels.iter().copied())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitStats {
    pub per_class_counts: [usize; NUM_LABELS],
    pub n_examples: usize,
}

impl SplitStats {
    pub fn from_label_vectors<'a, I>(labels: I) -> Self
    where
        I: IntoIterator<Item = &'a LabelVector>,
    {
        let mut per_class_counts = [0usize; NUM_LABELS];
        let mut n_examples = 0;
        for v in labels {
            n_examples += 1;
            for c in v.indices() {
                per_class_counts[c] += 1;
            }
        }
        Self {
            per_class_counts,
            n_examples,
        }
    }
}

pub fn split_stats(records: &[MemeRecord]) -> SplitStats {
    let mut per_class_counts = [0usize; NUM_LABELS];
    for r in records {
        for &c in &r.labels {
            per_class_counts[c] += 1;
        }
    }
    SplitStats {
        per_class_counts,
        n_examples: records.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightScheme {
    /// `n_examples / (22 * max(count, 1))`.
    #[default]
    Balanced,
}

pub fn class_weights(stats: &SplitStats, scheme: WeightScheme) -> Result<[f64; NUM_LABELS]> {
    if stats.per_class_counts.iter().all(|&c| c == 0) {
        return Err(Error::AllZeroCounts);
    }
    let mut w = [0.0; NUM_LABELS];
    match scheme {
        WeightScheme::Balanced => {
            let n = stats.n_examples as f64;
            for (w, &count) in w.iter_mut().zip(stats.per_class_counts.iter()) {
                *w = n / (NUM_LABELS as f64 * count.max(1) as f64);
            }
        }
    }
    Ok(w)
}
