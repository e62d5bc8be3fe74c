//! `MFARCH01` feature archive codec.
//!
//! Layout:
//!
//! | bytes          | content                                              |
//! |----------------|------------------------------------------------------|
//! | 0..8           | magic `MFARCH01`                                     |
//! | 8..12          | header length `L`, u32 little-endian                 |
//! | 12..12+L       | UTF-8 JSON `{"dims":[d_t,d_h,d_i],"ids":[...]}`      |
//! | 12+L..         | per id in order: `d_t` T, `d_h` H, `d_i` I floats    |
//!
//! Ids are sorted ascending (byte order). Floats are f32 little-endian. The
//! header may carry an extra `provenance` value, written after `ids`.
//! Encoding is canonical, so equal archives produce equal bytes.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Deserialize;

use super::{BundleDims, FeatureBundle};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"MFARCH01";

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureArchive {
    dims: BundleDims,
    bundles: BTreeMap<String, FeatureBundle>,
    provenance: Option<serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    dims: [usize; 3],
    ids: Vec<String>,
    #[serde(default)]
    provenance: Option<serde_json::Value>,
}

impl FeatureArchive {
    /// Every bundle must match `dims`.
    pub fn new(dims: BundleDims, bundles: BTreeMap<String, FeatureBundle>) -> Result<Self> {
        dims.validate()?;
        for (id, b) in &bundles {
            if b.dims() != dims {
                return Err(Error::InvalidRecord {
                    id: id.clone(),
                    reason: alloc::format!("bundle dims {} differ from archive dims {dims}", b.dims()),
                });
            }
            b.check_finite()
                .map_err(|_| Error::NonFinite(alloc::format!("bundle {id}")))?;
        }
        Ok(Self {
            dims,
            bundles,
            provenance: None,
        })
    }

    /// Infers dims from the first bundle; fails when the map is empty.
    pub fn from_bundles(bundles: BTreeMap<String, FeatureBundle>) -> Result<Self> {
        let dims = bundles.values().next().ok_or(Error::EmptyDataset)?.dims();
        Self::new(dims, bundles)
    }

    pub fn with_provenance(mut self, provenance: serde_json::Value) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn dims(&self) -> BundleDims {
        self.dims
    }

    pub fn bundles(&self) -> &BTreeMap<String, FeatureBundle> {
        &self.bundles
    }

    pub fn into_bundles(self) -> BTreeMap<String, FeatureBundle> {
        self.bundles
    }

    pub fn get(&self, id: &str) -> Option<&FeatureBundle> {
        self.bundles.get(id)
    }

    pub fn provenance(&self) -> Option<&serde_json::Value> {
        self.provenance.as_ref()
    }

    pub fn len(&self) -> usize {
        self.bundles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bundles.is_empty()
    }

    fn header_json(&self) -> Result<String> {
        let d = self.dims;
        let ids: Vec<&str> = self.bundles.keys().map(String::as_str).collect();
        let mut s = alloc::format!(
            "{{\"dims\":[{},{},{}],\"ids\":{}",
            d.text,
            d.hidden,
            d.prediction,
            serde_json::to_string(&ids)?
        );
        if let Some(p) = &self.provenance {
            s.push_str(",\"provenance\":");
            s.push_str(&serde_json::to_string(p)?);
        }
        s.push('}');
        Ok(s)
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let header = self.header_json()?;
        let header_len = u32::try_from(header.len()).map_err(|_| Error::Format {
            what: "feature archive",
            reason: "header longer than 4 GiB".into(),
        })?;
        let mut out = Vec::with_capacity(12 + header.len() + self.bundles.len() * self.dims.total() * 4);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&header_len.to_le_bytes());
        out.extend_from_slice(header.as_bytes());
        for b in self.bundles.values() {
            for x in b.text.iter().chain(&b.hidden).chain(&b.prediction) {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 12 {
            return Err(Error::Truncated {
                what: "feature archive preamble",
                expected: 12,
                actual: bytes.len(),
            });
        }
        if &bytes[..8] != MAGIC {
            return Err(Error::BadMagic { expected: "MFARCH01" });
        }
        let header_len = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
        let header_end = 12usize.checked_add(header_len).ok_or(Error::Truncated {
            what: "feature archive header",
            expected: usize::MAX,
            actual: bytes.len(),
        })?;
        if bytes.len() < header_end {
            return Err(Error::Truncated {
                what: "feature archive header",
                expected: header_end,
                actual: bytes.len(),
            });
        }
        let header_str = core::str::from_utf8(&bytes[12..header_end]).map_err(|_| Error::Format {
            what: "feature archive",
            reason: "header is not UTF-8".into(),
        })?;
        let header: Header = serde_json::from_str(header_str)?;
        let dims = BundleDims::new(header.dims[0], header.dims[1], header.dims[2]);
        dims.validate()?;
        let mut seen = alloc::collections::BTreeSet::new();
        if let Some(dup) = header.ids.iter().find(|id| !seen.insert(*id)) {
            return Err(Error::DuplicateId(dup.clone()));
        }
        if header.ids.windows(2).any(|p| p[0] > p[1]) {
            return Err(Error::Format {
                what: "feature archive",
                reason: "ids are not sorted".into(),
            });
        }
        let per_example = dims.total();
        let expected = header_end + header.ids.len() * per_example * 4;
        if bytes.len() != expected {
            return Err(Error::Truncated {
                what: "feature archive payload",
                expected,
                actual: bytes.len(),
            });
        }
        let floats: Vec<f32> = bytes[header_end..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        let mut bundles = BTreeMap::new();
        for (id, chunk) in header.ids.into_iter().zip(floats.chunks_exact(per_example)) {
            let (t, rest) = chunk.split_at(dims.text);
            let (h, i) = rest.split_at(dims.hidden);
            let bundle = FeatureBundle {
                text: t.to_vec(),
                hidden: h.to_vec(),
                prediction: i.to_vec(),
            };
            bundle
                .check_finite()
                .map_err(|_| Error::NonFinite(alloc::format!("archive bundle {id}")))?;
            bundles.insert(id, bundle);
        }
        Ok(Self {
            dims,
            bundles,
            provenance: header.provenance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn bundle(seed: f32, dims: BundleDims) -> FeatureBundle {
        let v = |n: usize, k: f32| (0..n).map(|j| seed * 0.37 + j as f32 * k - 1.0 / 3.0).collect();
        FeatureBundle::new(v(dims.text, 0.1), v(dims.hidden, -0.7), v(dims.prediction, 1e-3)).unwrap()
    }

    fn sample() -> FeatureArchive {
        let dims = BundleDims::new(3, 2, 1);
        let map = ["b", "a", "c"]
            .iter()
            .enumerate()
            .map(|(k, id)| (id.to_string(), bundle(k as f32, dims)))
            .collect();
        FeatureArchive::new(dims, map).unwrap()
    }

    #[test]
    fn layout_is_bit_exact() {
        let a = sample();
        let bytes = a.encode().unwrap();
        assert_eq!(&bytes[..8], b"MFARCH01");
        let header = br#"{"dims":[3,2,1],"ids":["a","b","c"]}"#;
        assert_eq!(
            u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize,
            header.len()
        );
        assert_eq!(&bytes[12..12 + header.len()], header);
        assert_eq!(bytes.len(), 12 + header.len() + 3 * 6 * 4);
        let first = f32::from_le_bytes(bytes[12 + header.len()..][..4].try_into().unwrap());
        assert_eq!(first.to_bits(), a.get("a").unwrap().text[0].to_bits());
    }

    #[test]
    fn round_trip_and_determinism() {
        let a = sample();
        let bytes = a.encode().unwrap();
        assert_eq!(FeatureArchive::decode(&bytes).unwrap(), a);
        assert_eq!(a.clone().encode().unwrap(), bytes);
        let p = a
            .clone()
            .with_provenance(serde_json::json!({"pooling": "mean", "text_model": "x"}));
        let pb = p.encode().unwrap();
        assert_eq!(FeatureArchive::decode(&pb).unwrap(), p);
    }

    #[test]
    fn rejects_mixed_dims() {
        let mut map = BTreeMap::new();
        map.insert("a".to_string(), bundle(0.0, BundleDims::new(3, 2, 1)));
        map.insert("b".to_string(), bundle(0.0, BundleDims::new(3, 2, 2)));
        assert!(FeatureArchive::from_bundles(map).is_err());
    }

    #[test]
    fn truncation_names_byte_counts() {
        let bytes = sample().encode().unwrap();
        let cut = &bytes[..bytes.len() - 3];
        let err = FeatureArchive::decode(cut).unwrap_err();
        assert_eq!(
            err,
            Error::Truncated {
                what: "feature archive payload",
                expected: bytes.len(),
                actual: bytes.len() - 3
            }
        );
        let msg = alloc::format!("{err}");
        assert!(msg.contains(&bytes.len().to_string()) && msg.contains(&(bytes.len() - 3).to_string()));
        assert!(matches!(
            FeatureArchive::decode(&bytes[..20]),
            Err(Error::Truncated { .. })
        ));
        assert!(matches!(
            FeatureArchive::decode(&bytes[..5]),
            Err(Error::Truncated { .. })
        ));
    }

    #[test]
    fn rejects_bad_magic_and_duplicates() {
        let mut bytes = sample().encode().unwrap();
        bytes[0] = b'X';
        assert_eq!(
            FeatureArchive::decode(&bytes).unwrap_err(),
            Error::BadMagic { expected: "MFARCH01" }
        );

        let header = br#"{"dims":[1,1,1],"ids":["a","a"]}"#;
        let mut dup = MAGIC.to_vec();
        dup.extend_from_slice(&(header.len() as u32).to_le_bytes());
        dup.extend_from_slice(header);
        dup.extend_from_slice(&[0u8; 24]);
        assert_eq!(
            FeatureArchive::decode(&dup).unwrap_err(),
            Error::DuplicateId("a".into())
        );
    }

    proptest! {
        #[test]
        fn round_trip_preserves_float_bits(
            raw in prop::collection::btree_map("[a-z0-9_]{1,6}", prop::collection::vec(any::<u32>(), 6), 1..8)
        ) {
            let dims = BundleDims::new(2, 3, 1);
            let finite = |b: u32| { let f = f32::from_bits(b); if f.is_finite() { f } else { 0.5 } };
            let map: BTreeMap<String, FeatureBundle> = raw.into_iter().map(|(id, bits)| {
                let v: Vec<f32> = bits.into_iter().map(finite).collect();
                (id, FeatureBundle::new(v[..2].to_vec(), v[2..5].to_vec(), v[5..].to_vec()).unwrap())
            }).collect();
            let a = FeatureArchive::new(dims, map).unwrap();
            let back = FeatureArchive::decode(&a.encode().unwrap()).unwrap();
            for (id, b) in a.bundles() {
                let c = back.get(id).unwrap();
                let bits = |v: &[f32]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
                prop_assert_eq!(bits(&b.text), bits(&c.text));
                prop_assert_eq!(bits(&b.hidden), bits(&c.hidden));
                prop_assert_eq!(bits(&b.prediction), bits(&c.prediction));
            }
        }
    }
}
