//! The four fusion topologies over `(T, H, I)` bundles.
//!
//! | topology | wiring |
//! |----------|--------|
//! | `Concat` | `head([T; I])` |
//! | `Early`  | `head(relu(W [T; H; I] + b))` |
//! | `Late`   | `sigmoid(a ⊙ f_t(T) + (1 - a) ⊙ f_i([H; I]))`, `a = sigmoid(g)` |
//! | `MFAS`   | `F' = sigmoid(A [T; H] + a)`, `F = sigmoid(B [T; F'; I] + b)`, `head(F)` |
//!
//! `head` is the shared classifier: dense layers of width 768 and 384 with
//! ReLU and dropout, then 22 sigmoid outputs. The late branches `f_t`, `f_i`
//! are `dense(256) + ReLU + dropout + dense(22)` and produce logits; the late
//! topology has no separate head.

pub mod checkpoint;
mod stack;
pub mod train;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::features::{BundleDims, FeatureBundle};
use crate::nn::{activation::sigmoid_scalar, Gradients, Parameterized, Rng};
use crate::vocab::{LabelVector, NUM_LABELS};

pub use stack::{Activation, Mode, Stack};
pub use train::{train, EpochRecord, TrainConfig, TrainOutcome, Trainer};

/// Declaration order is the fixed reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Topology {
    Concat,
    Early,
    Late,
    Mfas,
}

impl Topology {
    pub const ALL: [Topology; 4] = [Topology::Concat, Topology::Early, Topology::Late, Topology::Mfas];

    pub fn tag(self) -> &'static str {
        match self {
            Topology::Concat => "Concat",
            Topology::Early => "Early",
            Topology::Late => "Late",
            Topology::Mfas => "MFAS",
        }
    }

    fn stage_names(self) -> &'static [&'static str] {
        match self {
            Topology::Concat => &["head"],
            Topology::Early => &["joint", "head"],
            Topology::Late => &["late_text", "late_image"],
            Topology::Mfas => &["mfas_inner", "mfas_outer", "head"],
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Accepts tags case-insensitively.
impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Topology::ALL
            .into_iter()
            .find(|t| t.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidParameter(alloc::format!(
                    "unknown topology {s:?}; valid tags: Concat, Early, Late, MFAS"
                ))
            })
    }
}

impl Serialize for Topology {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for Topology {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Widths of the learned fusion and head layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Architecture {
    /// Output width of the early-fusion joint projection.
    pub joint: usize,
    /// Width of `F'`.
    pub mfas_inner: usize,
    /// Width of `F`.
    pub mfas_outer: usize,
    pub late_hidden: usize,
    pub head_hidden: Vec<usize>,
    pub dropout: f64,
}

impl Default for Architecture {
    fn default() -> Self {
        Self {
            joint: 512,
            mfas_inner: 512,
            mfas_outer: 512,
            late_hidden: 256,
            head_hidden: alloc::vec![768, 384],
            dropout: 0.2,
        }
    }
}

impl Architecture {
    pub fn validate(&self) -> Result<()> {
        let widths = [self.joint, self.mfas_inner, self.mfas_outer, self.late_hidden];
        if widths.iter().chain(&self.head_hidden).any(|&w| w == 0) {
            return Err(Error::InvalidParameter("layer widths must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::InvalidParameter(alloc::format!(
                "dropout must lie in [0, 1), got {}",
                self.dropout
            )));
        }
        Ok(())
    }
}

/// Intermediate representations recorded by a forward pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Intermediates {
    pub x_early: Option<Vec<f64>>,
    pub f_prime: Option<Vec<f64>>,
    pub f: Option<Vec<f64>>,
    /// Text and image logits of the late branches and the gate values.
    pub x_late: Option<(Vec<f64>, Vec<f64>, Vec<f64>)>,
}

pub struct ForwardTrace {
    stages: Vec<stack::StackTrace>,
    pub intermediates: Intermediates,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionModel {
    topology: Topology,
    dims: BundleDims,
    arch: Architecture,
    stages: Vec<Stack>,
    gate: Vec<f64>,
    gate_override: Option<f64>,
    pub seed: u64,
    pub step: u64,
}

fn head_stack(in_dim: usize, arch: &Architecture, rng: &mut Rng) -> Stack {
    let mut widths = alloc::vec![in_dim];
    widths.extend(&arch.head_hidden);
    widths.push(NUM_LABELS);
    let mut spec: Vec<(Activation, bool)> = arch.head_hidden.iter().map(|_| (Activation::Relu, true)).collect();
    spec.push((Activation::Linear, false));
    Stack::build(&widths, &spec, rng)
}

fn branch_stack(in_dim: usize, arch: &Architecture, rng: &mut Rng) -> Stack {
    Stack::build(
        &[in_dim, arch.late_hidden, NUM_LABELS],
        &[(Activation::Relu, true), (Activation::Linear, false)],
        rng,
    )
}

fn concat(parts: &[&[f64]]) -> Vec<f64> {
    let mut v = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
    for p in parts {
        v.extend_from_slice(p);
    }
    v
}

fn widen(v: &[f32]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

impl FusionModel {
    /// Glorot-initialized model drawn from stream 0 of `seed`.
    pub fn build(topology: Topology, dims: BundleDims, arch: Architecture, seed: u64) -> Result<Self> {
        dims.validate()?;
        arch.validate()?;
        let mut rng = Rng::with_stream(seed, 0);
        let (t, h, i) = (dims.text, dims.hidden, dims.prediction);
        let stages = match topology {
            Topology::Concat => alloc::vec![head_stack(t + i, &arch, &mut rng)],
            Topology::Early => alloc::vec![
                Stack::build(&[t + h + i, arch.joint], &[(Activation::Relu, false)], &mut rng),
                head_stack(arch.joint, &arch, &mut rng),
            ],
            Topology::Late => alloc::vec![branch_stack(t, &arch, &mut rng), branch_stack(h + i, &arch, &mut rng)],
            Topology::Mfas => alloc::vec![
                Stack::build(&[t + h, arch.mfas_inner], &[(Activation::Sigmoid, false)], &mut rng),
                Stack::build(
                    &[t + arch.mfas_inner + i, arch.mfas_outer],
                    &[(Activation::Sigmoid, false)],
                    &mut rng
                ),
                head_stack(arch.mfas_outer, &arch, &mut rng),
            ],
        };
        let gate = if topology == Topology::Late {
            alloc::vec![0.0; NUM_LABELS]
        } else {
            Vec::new()
        };
        Ok(Self {
            topology,
            dims,
            arch,
            stages,
            gate,
            gate_override: None,
            seed,
            step: 0,
        })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn dims(&self) -> BundleDims {
        self.dims
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn stage_names(&self) -> &'static [&'static str] {
        self.topology.stage_names()
    }

    pub fn stage(&self, name: &str) -> Option<&Stack> {
        let k = self.stage_names().iter().position(|n| *n == name)?;
        Some(&self.stages[k])
    }

    pub fn stage_mut(&mut self, name: &str) -> Option<&mut Stack> {
        let k = self.stage_names().iter().position(|n| *n == name)?;
        Some(&mut self.stages[k])
    }

    pub(crate) fn stages(&self) -> &[Stack] {
        &self.stages
    }

    /// Pre-sigmoid gate parameters of the late topology; empty otherwise.
    pub fn gate_params(&self) -> &[f64] {
        &self.gate
    }

    pub fn gate_params_mut(&mut self) -> &mut [f64] {
        &mut self.gate
    }

    /// Pins every late-fusion gate value to `a`, bypassing the learned gate.
    pub fn set_gate_override(&mut self, a: Option<f64>) {
        self.gate_override = a;
    }

    fn check_bundle(&self, b: &FeatureBundle) -> Result<()> {
        let got = b.dims();
        if got != self.dims {
            return Err(Error::InvalidParameter(alloc::format!(
                "bundle dims {got} do not match model dims {}",
                self.dims
            )));
        }
        Ok(())
    }

    pub fn forward_trace(&self, bundle: &FeatureBundle, mut mode: Mode<'_>) -> Result<ForwardTrace> {
        self.check_bundle(bundle)?;
        let t = widen(&bundle.text);
        let h = widen(&bundle.hidden);
        let i = widen(&bundle.prediction);
        let mut inter = Intermediates::default();
        let mut traces = Vec::with_capacity(self.stages.len());
        let logits = match self.topology {
            Topology::Concat => {
                let (z, tr) = self.stages[0].forward(&concat(&[&t, &i]), mode.reborrow())?;
                traces.push(tr);
                z
            }
            Topology::Early => {
                let (x, tr) = self.stages[0].forward(&concat(&[&t, &h, &i]), mode.reborrow())?;
                traces.push(tr);
                let (z, tr) = self.stages[1].forward(&x, mode.reborrow())?;
                traces.push(tr);
                inter.x_early = Some(x);
                z
            }
            Topology::Mfas => {
                let (fp, tr) = self.stages[0].forward(&concat(&[&t, &h]), mode.reborrow())?;
                traces.push(tr);
                let (f, tr) = self.stages[1].forward(&concat(&[&t, &fp, &i]), mode.reborrow())?;
                traces.push(tr);
                let (z, tr) = self.stages[2].forward(&f, mode.reborrow())?;
                traces.push(tr);
                inter.f_prime = Some(fp);
                inter.f = Some(f);
                z
            }
            Topology::Late => {
                let (zt, tr) = self.stages[0].forward(&t, mode.reborrow())?;
                traces.push(tr);
                let (zi, tr) = self.stages[1].forward(&concat(&[&h, &i]), mode.reborrow())?;
                traces.push(tr);
                let a: Vec<f64> = match self.gate_override {
                    Some(a) => alloc::vec![a; NUM_LABELS],
                    None => self.gate.iter().map(|&g| sigmoid_scalar(g)).collect(),
                };
                let z = (0..NUM_LABELS).map(|c| a[c] * zt[c] + (1.0 - a[c]) * zi[c]).collect();
                inter.x_late = Some((zt, zi, a));
                z
            }
        };
        let probs = logits.iter().map(|&z| sigmoid_scalar(z)).collect();
        Ok(ForwardTrace {
            stages: traces,
            intermediates: inter,
            probs,
        })
    }

    /// Hash of the ReLU sign pattern recorded in `trace`; equal patterns mean
    /// the network is on the same linear piece.
    pub fn relu_pattern(&self, trace: &ForwardTrace) -> u64 {
        let mut hash = 0xcbf2_9ce4_8422_2325;
        for (stage, tr) in self.stages.iter().zip(&trace.stages) {
            stage.fold_relu_pattern(tr, &mut hash);
        }
        hash
    }

    /// Inference-mode probabilities.
    pub fn forward(&self, bundle: &FeatureBundle) -> Result<Vec<f64>> {
        Ok(self.forward_trace(bundle, Mode::Eval)?.probs)
    }

    /// Accumulates parameter gradients for `dL/dprobs` into `grads`.
    pub fn backward(&self, trace: &ForwardTrace, grad_probs: &[f64], grads: &mut Gradients) -> Result<()> {
        if grad_probs.len() != NUM_LABELS || trace.stages.len() != self.stages.len() {
            return Err(Error::ShapeMismatch {
                context: "backward input",
                expected: NUM_LABELS,
                actual: grad_probs.len(),
            });
        }
        let g_z: Vec<f64> = trace
            .probs
            .iter()
            .zip(grad_probs)
            .map(|(&p, &g)| g * p * (1.0 - p))
            .collect();

        let mut offsets = Vec::with_capacity(self.stages.len() + 1);
        let mut off = 0;
        for s in &self.stages {
            offsets.push(off);
            off += s.tensor_count();
        }
        offsets.push(off);
        let expected_slots = off + usize::from(self.topology == Topology::Late);
        if grads.0.len() != expected_slots {
            return Err(Error::ShapeMismatch {
                context: "gradient tensors",
                expected: expected_slots,
                actual: grads.0.len(),
            });
        }
        let run = |k: usize, g: &[f64], grads: &mut Gradients| -> Vec<f64> {
            self.stages[k].backward(&trace.stages[k], g, &mut grads.0[offsets[k]..offsets[k + 1]])
        };

        match self.topology {
            Topology::Concat => {
                run(0, &g_z, grads);
            }
            Topology::Early => {
                let g_x = run(1, &g_z, grads);
                run(0, &g_x, grads);
            }
            Topology::Mfas => {
                let g_f = run(2, &g_z, grads);
                let g_in = run(1, &g_f, grads);
                let t = self.dims.text;
                run(0, &g_in[t..t + self.arch.mfas_inner], grads);
            }
            Topology::Late => {
                let (zt, zi, a) = trace.intermediates.x_late.as_ref().expect("late trace");
                let g_t: Vec<f64> = (0..NUM_LABELS).map(|c| a[c] * g_z[c]).collect();
                let g_i: Vec<f64> = (0..NUM_LABELS).map(|c| (1.0 - a[c]) * g_z[c]).collect();
                run(0, &g_t, grads);
                run(1, &g_i, grads);
                if self.gate_override.is_none() {
                    let gate = grads.0.last_mut().expect("gate slot");
                    for c in 0..NUM_LABELS {
                        gate[c] += g_z[c] * (zt[c] - zi[c]) * a[c] * (1.0 - a[c]);
                    }
                }
            }
        }
        Ok(())
    }

    /// `bits[c] = probs[c] >= threshold`, with `threshold` in `(0, 1]`.
    pub fn predict(&self, bundle: &FeatureBundle, threshold: f64) -> Result<LabelVector> {
        threshold_probs(&self.forward(bundle)?, threshold)
    }
}

pub fn validate_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!(
            "threshold must lie in (0, 1], got {threshold}"
        )))
    }
}

pub fn threshold_probs(probs: &[f64], threshold: f64) -> Result<LabelVector> {
    validate_threshold(threshold)?;
    let mut v = LabelVector::zeros();
    for (c, &p) in probs.iter().enumerate().take(NUM_LABELS) {
        v.set(c, p >= threshold);
    }
    Ok(v)
}

impl Parameterized for FusionModel {
    fn tensors(&self) -> Vec<&[f64]> {
        let mut v: Vec<&[f64]> = self.stages.iter().flat_map(|s| s.tensors()).collect();
        if self.topology == Topology::Late {
            v.push(&self.gate);
        }
        v
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let late = self.topology == Topology::Late;
        let mut v: Vec<&mut [f64]> = self.stages.iter_mut().flat_map(|s| s.tensors_mut()).collect();
        if late {
            v.push(&mut self.gate);
        }
        v
    }
}
