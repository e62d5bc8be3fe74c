//! Seeded synthetic datasets for smoke runs and tests.

use alloc::format;
use alloc::vec::Vec;

use crate::features::{BundleDims, FeatureBundle};
use crate::nn::Rng;
use crate::vocab::{LabelVector, NUM_LABELS};
use crate::Example;

/// `n` examples drawn around `clusters` random centres (one centre per
/// cluster in each modality, noise `±noise`). Examples of cluster `k` carry
/// labels `{k, k + clusters}` (mod 22), so the label is a function of the
/// cluster and the data is separable for small `noise`.
pub fn clustered_examples(n: usize, dims: BundleDims, clusters: usize, noise: f64, seed: u64) -> Vec<Example> {
    assert!(clusters > 0 && clusters <= NUM_LABELS, "cluster count out of range");
    let mut rng = Rng::new(seed);
    let centres: Vec<Vec<f64>> = (0..clusters)
        .map(|_| (0..dims.total()).map(|_| rng.uniform(-1.0, 1.0)).collect())
        .collect();
    (0..n)
        .map(|j| {
            let k = j % clusters;
            let v: Vec<f32> = centres[k]
                .iter()
                .map(|c| (c + rng.uniform(-noise, noise)) as f32)
                .collect();
            let (t, rest) = v.split_at(dims.text);
            let (h, i) = rest.split_at(dims.hidden);
            Example {
                id: format!("syn{j:04}"),
                bundle: FeatureBundle::new(t.to_vec(), h.to_vec(), i.to_vec()).expect("finite"),
                labels: LabelVector::from_indices([k, (k + clusters) % NUM_LABELS]),
            }
        })
        .collect()
}
