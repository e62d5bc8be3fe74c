//! Per-example feature bundles and the featurizers that produce them.
//!
//! A bundle carries three vectors: the text representation `T`, the image
//! representation taken from an intermediate layer `H`, and the image
//! prediction-level representation `I`. Pretrained-encoder embeddings arrive
//! through the archive format in [`archive`]; the built-in featurizers in
//! [`hashing`] and [`baseline`] are deterministic stand-ins with the same
//! roles.

pub mod archive;
pub mod baseline;
pub mod hashing;
pub mod image;
pub mod netpbm;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use archive::FeatureArchive;
pub use baseline::baseline_image_features;
pub use hashing::{hashed_text_features, HashedNgramConfig, HashedVectorizer, Weighting};
pub use image::{augment_image, resize_image, Augmentation, ColourShift, ImageMatrix, MODEL_INPUT_SIDE};

/// Dimensions `(d_t, d_h, d_i)` of a bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BundleDims {
    pub text: usize,
    pub hidden: usize,
    pub prediction: usize,
}

impl BundleDims {
    pub const fn new(text: usize, hidden: usize, prediction: usize) -> Self {
        Self {
            text,
            hidden,
            prediction,
        }
    }

    pub const fn total(&self) -> usize {
        self.text + self.hidden + self.prediction
    }

    pub fn validate(&self) -> Result<()> {
        if self.text == 0 || self.hidden == 0 || self.prediction == 0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "bundle dims must be positive, got ({}, {}, {})",
                self.text,
                self.hidden,
                self.prediction
            )));
        }
        Ok(())
    }
}

impl core::fmt::Display for BundleDims {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "({}, {}, {})", self.text, self.hidden, self.prediction)
    }
}

/// The `(T, H, I)` triple for one example, stored as `f32` like the archive.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBundle {
    pub text: Vec<f32>,
    pub hidden: Vec<f32>,
    pub prediction: Vec<f32>,
}

impl FeatureBundle {
    /// Fails on empty or non-finite vectors.
    pub fn new(text: Vec<f32>, hidden: Vec<f32>, prediction: Vec<f32>) -> Result<Self> {
        let b = Self {
            text,
            hidden,
            prediction,
        };
        b.dims().validate()?;
        b.check_finite()?;
        Ok(b)
    }

    pub fn dims(&self) -> BundleDims {
        BundleDims::new(self.text.len(), self.hidden.len(), self.prediction.len())
    }

    pub fn check_finite(&self) -> Result<()> {
        for (name, v) in [("T", &self.text), ("H", &self.hidden), ("I", &self.prediction)] {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(alloc::format!("feature vector {name}")));
            }
        }
        Ok(())
    }

    /// `[T; H; I]`.
    pub fn concat(&self) -> Vec<f64> {
        self.text
            .iter()
            .chain(&self.hidden)
            .chain(&self.prediction)
            .map(|&x| x as f64)
            .collect()
    }

    /// Inverse of [`concat`](Self::concat) for the given dims, rounding to `f32`.
    pub fn from_concat(values: &[f64], dims: BundleDims) -> Result<Self> {
        if values.len() != dims.total() {
            return Err(Error::ShapeMismatch {
                context: "concatenated bundle",
                expected: dims.total(),
                actual: values.len(),
            });
        }
        let to32 = |s: &[f64]| s.iter().map(|&x| x as f32).collect::<Vec<f32>>();
        let (t, rest) = values.split_at(dims.text);
        let (h, i) = rest.split_at(dims.hidden);
        Self::new(to32(t), to32(h), to32(i))
    }
}
