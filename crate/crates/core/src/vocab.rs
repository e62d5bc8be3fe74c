//! The fixed 22-technique label space.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const NUM_LABELS: usize = 22;

/// Checked-in manifest, one technique name per line, in canonical order.
pub const DEFAULT_MANIFEST: &str = include_str!("../data/vocabulary.txt");

/// Ordered list of the 22 technique names.
///
/// Position `i` in the manifest is bit `i` of every [`LabelVector`]; models
/// and archives rely on this order being stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVocabulary {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl LabelVocabulary {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let names: Vec<String> = names.into_iter().map(|s| s.as_ref().trim().to_string()).collect();
        if names.len() != NUM_LABELS {
            return Err(Error::InvalidVocabulary(alloc::format!(
                "expected {NUM_LABELS} names, got {}",
                names.len()
            )));
        }
        let mut index = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidVocabulary(alloc::format!("empty name at line {}", i + 1)));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidVocabulary(alloc::format!("duplicate name {name:?}")));
            }
        }
        Ok(Self { names, index })
    }

    /// Parses a manifest: one name per non-blank line.
    pub fn from_manifest(text: &str) -> Result<Self> {
        Self::new(text.lines().filter(|l| !l.trim().is_empty()))
    }

    pub fn canonical() -> Self {
        Self::from_manifest(DEFAULT_MANIFEST).expect("shipped vocabulary manifest is valid")
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    /// Case-sensitive lookup after trimming surrounding whitespace.
    pub fn index(&self, name: &str) -> Option<usize> {
        self.index.get(name.trim()).copied()
    }
}

/// Binary indicator vector over the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LabelVector {
    bits: [bool; NUM_LABELS],
}

impl LabelVector {
    pub const fn zeros() -> Self {
        Self {
            bits: [false; NUM_LABELS],
        }
    }

    pub fn from_bits(bits: [bool; NUM_LABELS]) -> Self {
        Self { bits }
    }

    /// Panics if an index is out of range.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut v = Self::zeros();
        for i in indices {
            v.bits[i] = true;
        }
        v
    }

    pub fn get(&self, class: usize) -> bool {
        self.bits[class]
    }

    pub fn set(&mut self, class: usize, value: bool) {
        self.bits[class] = value;
    }

    pub fn bits(&self) -> &[bool; NUM_LABELS] {
        &self.bits
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// The vector as 0.0/1.0 targets.
    pub fn to_targets(&self) -> [f64; NUM_LABELS] {
        let mut out = [0.0; NUM_LABELS];
        for (o, b) in out.iter_mut().zip(self.bits.iter()) {
            *o = if *b { 1.0 } else { 0.0 };
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let vocab = LabelVocabulary::canonical();
        assert_eq!(vocab.names().len(), NUM_LABELS);
        for (i, name) in vocab.names().iter().enumerate() {
            assert_eq!(vocab.index(name), Some(i));
        }
        assert_eq!(vocab.index("Loaded Language"), Some(10));
        assert_eq!(vocab.index("Smears"), Some(18));
        assert_eq!(vocab.index("  Smears "), Some(18));
        assert_eq!(vocab.index("smears"), None);
    }

    #[test]
    fn rejects_bad_manifests() {
        assert!(LabelVocabulary::from_manifest("a\nb\n").is_err());
        let dup: Vec<String> = (0..21).map(|i| alloc::format!("t{i}")).chain(["t0".into()]).collect();
        assert!(matches!(LabelVocabulary::new(dup), Err(Error::InvalidVocabulary(_))));
    }
}
