//! `MFNET01` model checkpoint codec.
//!
//! Layout:
//!
//! | bytes     | content                                   |
//! |-----------|-------------------------------------------|
//! | 0..7      | magic `MFNET01`                           |
//! | 7..11     | header length `L`, u32 little-endian      |
//! | 11..11+L  | UTF-8 JSON header                         |
//! | 11+L..    | parameters, f32 little-endian             |
//!
//! Parameters follow the model's tensor order: for each layer (named
//! `<stage>.<k>`, listed in the header) the `out x in` row-major weight
//! then the bias, and for the late topology the 22 gate values last.
//! Values are rounded to f32 on write.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Architecture, FusionModel, Topology};
use crate::error::{Error, Result};
use crate::features::BundleDims;
use crate::nn::Parameterized;

pub const MAGIC: &[u8; 7] = b"MFNET01";
const PREAMBLE: usize = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerShape {
    pub name: String,
    #[serde(rename = "in")]
    pub in_dim: usize,
    #[serde(rename = "out")]
    pub out_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointHeader {
    pub topology: Topology,
    pub dims: [usize; 3],
    pub architecture: Architecture,
    pub layers: Vec<LayerShape>,
    pub gate: usize,
    pub seed: u64,
    pub step: u64,
    pub param_count: usize,
}

fn header_for(model: &FusionModel) -> CheckpointHeader {
    let d = model.dims();
    let mut layers = Vec::new();
    for (name, stage) in model.stage_names().iter().zip(model.stages()) {
        for (k, l) in stage.layers.iter().enumerate() {
            layers.push(LayerShape {
                name: alloc::format!("{name}.{k}"),
                in_dim: l.in_dim(),
                out_dim: l.out_dim(),
            });
        }
    }
    CheckpointHeader {
        topology: model.topology(),
        dims: [d.text, d.hidden, d.prediction],
        architecture: model.architecture().clone(),
        layers,
        gate: model.gate_params().len(),
        seed: model.seed,
        step: model.step,
        param_count: model.param_count(),
    }
}

pub fn encode(model: &FusionModel) -> Result<Vec<u8>> {
    let header = serde_json::to_string(&header_for(model))?;
    let len = u32::try_from(header.len()).map_err(|_| Error::Format {
        what: "checkpoint",
        reason: "header longer than 4 GiB".into(),
    })?;
    let mut out = Vec::with_capacity(PREAMBLE + header.len() + 4 * model.param_count());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    for t in model.tensors() {
        for &x in t {
            out.extend_from_slice(&(x as f32).to_le_bytes());
        }
    }
    Ok(out)
}

pub fn read_header(bytes: &[u8]) -> Result<(CheckpointHeader, usize)> {
    if bytes.len() < PREAMBLE {
        return Err(Error::Truncated {
            what: "checkpoint preamble",
            expected: PREAMBLE,
            actual: bytes.len(),
        });
    }
    if &bytes[..7] != MAGIC {
        return Err(Error::BadMagic { expected: "MFNET01" });
    }
    let len = u32::from_le_bytes(bytes[7..11].try_into().expect("4 bytes")) as usize;
    let end = PREAMBLE + len;
    if bytes.len() < end {
        return Err(Error::Truncated {
            what: "checkpoint header",
            expected: end,
            actual: bytes.len(),
        });
    }
    let text = core::str::from_utf8(&bytes[PREAMBLE..end]).map_err(|e| Error::Format {
        what: "checkpoint header",
        reason: alloc::format!("{e}"),
    })?;
    Ok((serde_json::from_str(text)?, end))
}

pub fn decode(bytes: &[u8]) -> Result<FusionModel> {
    let (header, start) = read_header(bytes)?;
    let [t, h, i] = header.dims;
    let mut model = FusionModel::build(
        header.topology,
        BundleDims::new(t, h, i),
        header.architecture.clone(),
        header.seed,
    )?;
    model.step = header.step;
    let expected = header_for(&model);
    if expected.layers != header.layers || expected.gate != header.gate || expected.param_count != header.param_count {
        return Err(Error::Format {
            what: "checkpoint header",
            reason: "layer shapes are inconsistent with topology, dims and architecture".into(),
        });
    }
    let payload = &bytes[start..];
    if payload.len() != 4 * header.param_count {
        return Err(Error::Truncated {
            what: "checkpoint parameters",
            expected: start + 4 * header.param_count,
            actual: bytes.len(),
        });
    }
    let mut words = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")));
    for tensor in model.tensors_mut() {
        for x in tensor.iter_mut() {
            let v = words.next().expect("length checked");
            if !v.is_finite() {
                return Err(Error::NonFinite("checkpoint parameter".into()));
            }
            *x = v as f64;
        }
    }
    Ok(model)
}
