//! Signed feature hashing of word n-grams.
//!
//! Each n-gram (words joined by a single space) is hashed with 64-bit FNV-1a
//! over the seed's 8 little-endian bytes followed by the n-gram's UTF-8
//! bytes. The bucket is `hash % dim`; the sign is `+1` when `hash` has an
//! even number of set bits and `-1` otherwise. The accumulated vector is
//! L2-normalized unless it is all zero.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    #[default]
    Tf,
    Tfidf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HashedNgramConfig {
    /// Inclusive word n-gram range.
    pub n_range: (usize, usize),
    pub dim: usize,
    pub seed: u64,
    pub weighting: Weighting,
}

impl Default for HashedNgramConfig {
    fn default() -> Self {
        Self {
            n_range: (1, 2),
            dim: 2048,
            seed: 0,
            weighting: Weighting::Tf,
        }
    }
}

impl HashedNgramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParameter(alloc::format!(
                "hash dim must be >= 2, got {}",
                self.dim
            )));
        }
        if self.n_range.0 == 0 || self.n_range.0 > self.n_range.1 {
            return Err(Error::InvalidParameter(alloc::format!(
                "n-gram range {:?} must be nondecreasing and start at 1 or more",
                self.n_range
            )));
        }
        Ok(())
    }
}

pub fn fnv1a_seeded(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in seed.to_le_bytes().iter().chain(bytes) {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// `(bucket, sign)` for one n-gram.
pub fn bucket_and_sign(term: &str, config: &HashedNgramConfig) -> (usize, f64) {
    let h = fnv1a_seeded(config.seed, term.as_bytes());
    let bucket = (h % config.dim as u64) as usize;
    let sign = if h.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    (bucket, sign)
}

fn ngrams(text: &str, (lo, hi): (usize, usize)) -> Vec<String> {
    let words: Vec<String> = text.split_whitespace().map(|w| w.to_lowercase()).collect();
    let mut out = Vec::new();
    for n in lo..=hi {
        for window in words.windows(n) {
            out.push(window.join(" "));
        }
    }
    out
}

fn raw_counts(text: &str, config: &HashedNgramConfig) -> Vec<f64> {
    let mut v = alloc::vec![0.0; config.dim];
    for g in ngrams(text, config.n_range) {
        let (b, s) = bucket_and_sign(&g, config);
        v[b] += s;
    }
    v
}

fn l2_normalize(v: &mut [f64]) {
    let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
    if norm > 0.0 {
        for x in v {
            *x /= norm;
        }
    }
}

/// Term-frequency hashed features. Tf-idf needs corpus statistics, so a
/// `Tfidf` config is rejected here; use [`HashedVectorizer`].
pub fn hashed_text_features(text: &str, config: &HashedNgramConfig) -> Result<Vec<f64>> {
    config.validate()?;
    if config.weighting == Weighting::Tfidf {
        return Err(Error::InvalidParameter(
            "tf-idf weighting needs a fitted HashedVectorizer".into(),
        ));
    }
    let mut v = raw_counts(text, config);
    l2_normalize(&mut v);
    Ok(v)
}

/// Hashed vectorizer with optional per-bucket smoothed idf,
/// `idf = ln((1 + n_docs) / (1 + df)) + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HashedVectorizer {
    config: HashedNgramConfig,
    idf: Option<Vec<f64>>,
}

impl HashedVectorizer {
    /// Fits idf over `corpus` when the config asks for tf-idf.
    pub fn fit<'a, I>(config: HashedNgramConfig, corpus: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        config.validate()?;
        let idf = match config.weighting {
            Weighting::Tf => None,
            Weighting::Tfidf => {
                let mut df = alloc::vec![0usize; config.dim];
                let mut n_docs = 0usize;
                let mut seen = alloc::vec![false; config.dim];
                for doc in corpus {
                    n_docs += 1;
                    seen.iter_mut().for_each(|s| *s = false);
                    for g in ngrams(doc, config.n_range) {
                        seen[bucket_and_sign(&g, &config).0] = true;
                    }
                    for (d, s) in df.iter_mut().zip(&seen) {
                        *d += *s as usize;
                    }
                }
                Some(
                    df.iter()
                        .map(|&d| libm::log((1.0 + n_docs as f64) / (1.0 + d as f64)) + 1.0)
                        .collect(),
                )
            }
        };
        Ok(Self { config, idf })
    }

    pub fn config(&self) -> &HashedNgramConfig {
        &self.config
    }

    pub fn transform(&self, text: &str) -> Vec<f64> {
        let mut v = raw_counts(text, &self.config);
        if let Some(idf) = &self.idf {
            for (x, w) in v.iter_mut().zip(idf) {
                *x *= w;
            }
        }
        l2_normalize(&mut v);
        v
    }
}
