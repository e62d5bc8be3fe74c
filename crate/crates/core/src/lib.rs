//! Multimodal propaganda-technique classifier core.
//!
//! Everything in this crate is pure computation over in-memory data and
//! builds under `#![no_std]` with `alloc`. File access, the command line and
//! logging back-ends live in the `memefuse` companion crate; this crate only
//! encodes and decodes byte buffers.
//!
//! The pipeline is:
//!
//! 1. [`dataset`]: multi-label meme records over the fixed 22-technique
//!    [`vocab::LabelVocabulary`].
//! 2. [`text`]: deterministic normalization of OCR meme text.
//! 3. [`features`]: per-example [`features::FeatureBundle`]s `(T, H, I)` from
//!    hashed n-grams and image statistics, plus the `MFARCH01` archive codec.
//! 4. [`nn`]: dense layers, losses, Adam and a finite-difference oracle.
//! 5. [`fusion`]: the Concat, Early, Late and MFAS topologies and training.
//! 6. [`imbalance`]: oversampling, SMOTE, Tomek links and NearMiss.
//! 7. [`eval`]: micro-averaged precision, recall and F1.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod fusion;
pub mod imbalance;
pub mod nn;
pub mod synthetic;
pub mod text;
pub mod vocab;

pub use error::{Error, Result};
pub use features::FeatureBundle;
pub use vocab::{LabelVector, LabelVocabulary, NUM_LABELS};

/// One training or evaluation example: an id, its feature bundle and its gold labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub id: alloc::string::String,
    pub bundle: FeatureBundle,
    pub labels: LabelVector,
}
