//! Dataset resampling for rare labels: random oversampling, SMOTE, Tomek
//! links and NearMiss-1.
//!
//! The underlying algorithms are single-label; here each target label `c` is
//! handled as the binary problem "carries `c`" against "does not", in
//! ascending label order. Synthetic examples copy the full label vector of
//! their seed example. Distances are Euclidean over the concatenated bundle
//! `[T; H; I]`, optionally z-scored per coordinate.
//!
//! Only pass the training partition to these functions.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::SplitStats;
use crate::error::{Error, Result};
use crate::features::FeatureBundle;
use crate::nn::Rng;
use crate::vocab::NUM_LABELS;
use crate::Example;

pub const DEFAULT_COUNT_THRESHOLD: usize = 20;
const NEAR_MISS_NEIGHBOURS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ResampleMethod {
    Oversample,
    Smote {
        #[serde(default = "default_k")]
        k: usize,
    },
    Tomek,
    NearMiss {
        #[serde(default = "default_version")]
        version: u8,
    },
}

fn default_k() -> usize {
    5
}

fn default_version() -> u8 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResampleConfig {
    pub method: ResampleMethod,
    /// Explicit labels to treat; by default every label with
    /// `0 < count < count_threshold`.
    #[serde(default)]
    pub target_labels: Option<Vec<usize>>,
    #[serde(default = "default_threshold")]
    pub count_threshold: usize,
    #[serde(default)]
    pub seed: u64,
    /// Z-score every coordinate before measuring distances.
    #[serde(default)]
    pub standardize: bool,
}

fn default_threshold() -> usize {
    DEFAULT_COUNT_THRESHOLD
}

impl ResampleConfig {
    pub fn new(method: ResampleMethod) -> Self {
        Self {
            method,
            target_labels: None,
            count_threshold: DEFAULT_COUNT_THRESHOLD,
            seed: 0,
            standardize: false,
        }
    }

    pub fn with_targets(mut self, labels: Vec<usize>) -> Self {
        self.target_labels = Some(labels);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            ResampleMethod::Smote { k: 0 } => return Err(Error::Resample("smote k must be at least 1".into())),
            ResampleMethod::NearMiss { version } if version != 1 => {
                return Err(Error::Resample(format!(
                    "only NearMiss version 1 is supported, got {version}"
                )))
            }
            _ => {}
        }
        if let Some(t) = &self.target_labels {
            if let Some(&bad) = t.iter().find(|&&c| c >= NUM_LABELS) {
                return Err(Error::Resample(format!("target label {bad} out of range")));
            }
            if t.is_empty() && matches!(self.method, ResampleMethod::Oversample | ResampleMethod::Smote { .. }) {
                return Err(Error::Resample("target_labels must be non-empty".into()));
            }
        }
        Ok(())
    }
}

fn class_counts(data: &[Example]) -> [usize; NUM_LABELS] {
    SplitStats::from_label_vectors(data.iter().map(|e| &e.labels)).per_class_counts
}

/// Labels with `0 < count < threshold`, ascending.
pub fn default_target_labels(data: &[Example], threshold: usize) -> Vec<usize> {
    let counts = class_counts(data);
    (0..NUM_LABELS)
        .filter(|&c| counts[c] > 0 && counts[c] < threshold)
        .collect()
}

/// Floor of the median of the 22 per-class counts, zero counts included.
pub fn median_class_count(data: &[Example]) -> usize {
    let mut counts = class_counts(data);
    counts.sort_unstable();
    (counts[NUM_LABELS / 2 - 1] + counts[NUM_LABELS / 2]) / 2
}

fn targets(data: &[Example], cfg: &ResampleConfig, min_carriers: usize) -> Result<Vec<usize>> {
    cfg.validate()?;
    let counts = class_counts(data);
    match &cfg.target_labels {
        Some(t) => {
            let t: BTreeSet<usize> = t.iter().copied().collect();
            for &c in &t {
                if counts[c] < min_carriers {
                    return Err(Error::Resample(format!(
                        "label {c} has {} carriers, at least {min_carriers} required",
                        counts[c]
                    )));
                }
            }
            Ok(t.into_iter().collect())
        }
        None => {
            let mut t = default_target_labels(data, cfg.count_threshold);
            t.retain(|&c| {
                let ok = counts[c] >= min_carriers;
                if !ok {
                    log::warn!("skipping label {c}: {} carriers, {min_carriers} required", counts[c]);
                }
                ok
            });
            Ok(t)
        }
    }
}

fn carriers(data: &[Example], c: usize) -> Vec<usize> {
    (0..data.len()).filter(|&i| data[i].labels.get(c)).collect()
}

/// Distance space: raw concatenations, or per-coordinate z-scores.
fn points(data: &[Example], standardize: bool) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = data.iter().map(|e| e.bundle.concat()).collect();
    if standardize && !pts.is_empty() {
        let d = pts[0].len();
        let n = pts.len() as f64;
        for j in 0..d {
            let mean = pts.iter().map(|p| p[j]).sum::<f64>() / n;
            let var = pts.iter().map(|p| (p[j] - mean) * (p[j] - mean)).sum::<f64>() / n;
            let sd = libm::sqrt(var);
            for p in &mut pts {
                p[j] = if sd > 0.0 { (p[j] - mean) / sd } else { 0.0 };
            }
        }
    }
    pts
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the `k` candidates nearest to `from` (excluding `from`),
/// nearest first, ties broken by lower index.
fn nearest(pts: &[Vec<f64>], from: usize, candidates: &[usize], k: usize) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = candidates
        .iter()
        .filter(|&&j| j != from)
        .map(|&j| (sq_dist(&pts[from], &pts[j]), j))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.into_iter().take(k).map(|x| x.1).collect()
}

/// `x + u (y - x)` per coordinate.
pub fn interpolate(x: &[f64], y: &[f64], u: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + u * (b - a)).collect()
}

/// Duplicates uniformly drawn original carriers of each target label until
/// its count reaches the median class count. Output is the input followed
/// by the duplicates, which get ids `<id>#dup<n>`.
pub fn random_oversample(data: &[Example], cfg: &ResampleConfig) -> Result<Vec<Example>> {
    let labels = targets(data, cfg, 1)?;
    let goal = median_class_count(data);
    let mut counts = class_counts(data);
    let mut rng = Rng::with_stream(cfg.seed, 0x0D5A);
    let mut out = data.to_vec();
    let mut n = 0usize;
    for c in labels {
        let pool = carriers(data, c);
        while counts[c] < goal {
            let src = &data[pool[rng.below(pool.len())]];
            for k in src.labels.indices() {
                counts[k] += 1;
            }
            out.push(Example {
                id: format!("{}#dup{n}", src.id),
                bundle: src.bundle.clone(),
                labels: src.labels,
            });
            n += 1;
        }
    }
    Ok(out)
}

/// SMOTE over each target label's original carriers, up to the median
/// class count. Synthetic ids are `<id>#smote<n>`.
pub fn smote(data: &[Example], cfg: &ResampleConfig) -> Result<Vec<Example>> {
    let ResampleMethod::Smote { k } = cfg.method else {
        return Err(Error::Resample("smote called with a non-smote config".into()));
    };
    let labels = targets(data, cfg, 2)?;
    let goal = median_class_count(data);
    let mut counts = class_counts(data);
    let pts = points(data, cfg.standardize);
    let mut rng = Rng::with_stream(cfg.seed, 0x5307E);
    let mut out = data.to_vec();
    let mut n = 0usize;
    for c in labels {
        let pool = carriers(data, c);
        let k_eff = k.min(pool.len() - 1);
        if k_eff < k {
            log::warn!("label {c}: k clipped from {k} to {k_eff} ({} carriers)", pool.len());
        }
        while counts[c] < goal {
            let xi = pool[rng.below(pool.len())];
            let nn = nearest(&pts, xi, &pool, k_eff);
            let yi = nn[rng.below(nn.len())];
            let u = rng.next_f64();
            let src = &data[xi];
            let v = interpolate(&src.bundle.concat(), &data[yi].bundle.concat(), u);
            let bundle = FeatureBundle::from_concat(&v, src.bundle.dims())?;
            for k in src.labels.indices() {
                counts[k] += 1;
            }
            out.push(Example {
                id: format!("{}#smote{n}", src.id),
                bundle,
                labels: src.labels,
            });
            n += 1;
        }
    }
    Ok(out)
}

/// Indices to remove: for each target label, the non-carrier member of every
/// mutual-nearest-neighbour pair that straddles the label. Carriers of any
/// target label are never removed.
pub fn tomek_links(data: &[Example], cfg: &ResampleConfig) -> Result<BTreeSet<usize>> {
    let labels = targets(data, cfg, 0)?;
    if data.len() < 2 {
        return Ok(BTreeSet::new());
    }
    let pts = points(data, cfg.standardize);
    let all: Vec<usize> = (0..data.len()).collect();
    let nn: Vec<usize> = (0..data.len()).map(|i| nearest(&pts, i, &all, 1)[0]).collect();
    let protected: BTreeSet<usize> = (0..data.len())
        .filter(|&i| labels.iter().any(|&c| data[i].labels.get(c)))
        .collect();
    let mut remove = BTreeSet::new();
    for &c in &labels {
        for i in 0..data.len() {
            let j = nn[i];
            if nn[j] == i && data[i].labels.get(c) && !data[j].labels.get(c) && !protected.contains(&j) {
                remove.insert(j);
            }
        }
    }
    Ok(remove)
}

/// NearMiss-1: for each target label keep every carrier and the
/// non-carriers with the smallest mean distance to their 3 nearest
/// carriers, as many as there are carriers. Returns the union of kept
/// indices over labels.
pub fn near_miss(data: &[Example], cfg: &ResampleConfig) -> Result<BTreeSet<usize>> {
    let labels = targets(data, cfg, 1)?;
    let pts = points(data, cfg.standardize);
    let mut kept = BTreeSet::new();
    for c in labels {
        let minority = carriers(data, c);
        let majority: Vec<usize> = (0..data.len()).filter(|&i| !data[i].labels.get(c)).collect();
        if majority.is_empty() {
            return Err(Error::Resample(format!("label {c}: every example carries it")));
        }
        kept.extend(&minority);
        if majority.len() <= minority.len() {
            kept.extend(&majority);
            continue;
        }
        let k = NEAR_MISS_NEIGHBOURS.min(minority.len());
        let mut scored: Vec<(f64, usize)> = majority
            .iter()
            .map(|&j| {
                let near = nearest(&pts, j, &minority, k);
                let mean = near.iter().map(|&m| libm::sqrt(sq_dist(&pts[j], &pts[m]))).sum::<f64>() / k as f64;
                (mean, j)
            })
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        kept.extend(scored.iter().take(minority.len()).map(|s| s.1));
    }
    Ok(kept)
}

/// Runs the configured method and returns the resampled training set.
pub fn apply(data: &[Example], cfg: &ResampleConfig) -> Result<Vec<Example>> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    match cfg.method {
        ResampleMethod::Oversample => random_oversample(data, cfg),
        ResampleMethod::Smote { .. } => smote(data, cfg),
        ResampleMethod::Tomek => {
            let remove = tomek_links(data, cfg)?;
            Ok(data
                .iter()
                .enumerate()
                .filter(|(i, _)| !remove.contains(i))
                .map(|(_, e)| e.clone())
                .collect())
        }
        ResampleMethod::NearMiss { .. } => {
            let keep = near_miss(data, cfg)?;
            Ok(keep.iter().map(|&i| data[i].clone()).collect())
        }
    }
}
