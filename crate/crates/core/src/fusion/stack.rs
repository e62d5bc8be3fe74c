use alloc::vec::Vec;

use crate::error::Result;
use crate::nn::{activation, dropout, DenseLayer, DropoutMask, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Linear,
    Relu,
    Sigmoid,
}

/// A chain of dense layers, each followed by an activation and optionally by
/// dropout.
#[derive(Debug, Clone, PartialEq)]
pub struct Stack {
    pub layers: Vec<DenseLayer>,
    pub activations: Vec<Activation>,
    pub dropout: Vec<bool>,
}

#[derive(Debug, Clone, Default)]
pub struct StackTrace {
    inputs: Vec<Vec<f64>>,
    outputs: Vec<Vec<f64>>,
    masks: Vec<Option<DropoutMask>>,
}

/// Training mode carries the dropout probability and its generator.
pub enum Mode<'a> {
    Eval,
    Train { p: f64, rng: &'a mut Rng },
}

impl Mode<'_> {
    pub fn reborrow(&mut self) -> Mode<'_> {
        match self {
            Mode::Eval => Mode::Eval,
            Mode::Train { p, rng } => Mode::Train { p: *p, rng },
        }
    }
}

impl Stack {
    pub fn build(widths: &[usize], spec: &[(Activation, bool)], rng: &mut Rng) -> Self {
        debug_assert_eq!(widths.len(), spec.len() + 1);
        let layers = widths.windows(2).map(|w| DenseLayer::glorot(w[0], w[1], rng)).collect();
        Self {
            layers,
            activations: spec.iter().map(|s| s.0).collect(),
            dropout: spec.iter().map(|s| s.1).collect(),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    pub fn tensor_count(&self) -> usize {
        2 * self.layers.len()
    }

    pub fn tensors(&self) -> impl Iterator<Item = &[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weight.as_slice(), l.bias.as_slice()])
    }

    pub fn tensors_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weight.as_mut_slice(), l.bias.as_mut_slice()])
    }

    pub fn forward(&self, x: &[f64], mut mode: Mode<'_>) -> Result<(Vec<f64>, StackTrace)> {
        let mut trace = StackTrace::default();
        let mut h = x.to_vec();
        for ((layer, act), &drop) in self.layers.iter().zip(&self.activations).zip(&self.dropout) {
            let z = layer.forward(&h)?;
            let a = match act {
                Activation::Linear => z,
                Activation::Relu => activation::relu(&z),
                Activation::Sigmoid => activation::sigmoid(&z),
            };
            trace.inputs.push(core::mem::take(&mut h));
            let (out, mask) = match (&mut mode, drop) {
                (Mode::Train { p, rng }, true) => {
                    let (y, m) = dropout(&a, *p, rng, true);
                    (y, Some(m))
                }
                _ => (a.clone(), None),
            };
            trace.outputs.push(a);
            trace.masks.push(mask);
            h = out;
        }
        Ok((h, trace))
    }

    /// Folds the sign pattern of every ReLU output into an FNV-1a hash.
    pub fn fold_relu_pattern(&self, trace: &StackTrace, hash: &mut u64) {
        for (act, out) in self.activations.iter().zip(&trace.outputs) {
            if *act == Activation::Relu {
                for &v in out {
                    *hash ^= u64::from(v > 0.0);
                    *hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
                }
            }
        }
    }

    /// Writes parameter gradients into `grads` (two slots per layer) and
    /// returns the gradient with respect to the stack input.
    pub fn backward(&self, trace: &StackTrace, grad_out: &[f64], grads: &mut [Vec<f64>]) -> Vec<f64> {
        let mut g = grad_out.to_vec();
        for k in (0..self.layers.len()).rev() {
            if let Some(mask) = &trace.masks[k] {
                g = mask.backward(&g);
            }
            let a = &trace.outputs[k];
            g = match self.activations[k] {
                Activation::Linear => g,
                Activation::Relu => activation::relu_backward(a, &g),
                Activation::Sigmoid => activation::sigmoid_backward(a, &g),
            };
            let (gw, gb) = grads[2 * k..2 * k + 2].split_at_mut(1);
            g = self.layers[k].backward(&trace.inputs[k], &g, &mut gw[0], &mut gb[0]);
        }
        g
    }
}
