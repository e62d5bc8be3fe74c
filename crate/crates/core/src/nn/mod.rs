//! Small dense-network engine with explicit reverse-mode gradients.
//!
//! Parameters are plain `f64` tensors (flat slices). Anything trainable
//! implements [`Parameterized`], listing its tensors in a fixed order; a
//! [`Gradients`] value holds one buffer per tensor in that same order.

pub mod activation;
pub mod adam;
pub mod dense;
pub mod dropout;
pub mod gradcheck;
pub mod loss;
pub mod rng;

use alloc::vec::Vec;

pub use activation::{relu, relu_backward, sigmoid, sigmoid_scalar};
pub use adam::{AdamConfig, AdamState};
pub use dense::DenseLayer;
pub use dropout::{dropout, DropoutMask};
pub use loss::{bce_loss, focal_loss, LossSpec};
pub use rng::Rng;

pub trait Parameterized {
    fn tensors(&self) -> Vec<&[f64]>;
    fn tensors_mut(&mut self) -> Vec<&mut [f64]>;

    fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    fn zero_gradients(&self) -> Gradients {
        Gradients(self.tensors().iter().map(|t| alloc::vec![0.0; t.len()]).collect())
    }
}

/// One gradient buffer per parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(pub Vec<Vec<f64>>);

impl Gradients {
    pub fn tensors(&self) -> &[Vec<f64>] {
        &self.0
    }

    /// Mutable access to two distinct buffers at once.
    pub fn pair_mut(&mut self, a: usize, b: usize) -> (&mut [f64], &mut [f64]) {
        assert!(a < b, "pair_mut expects ascending slots");
        let (lo, hi) = self.0.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, k: f64) {
        for t in &mut self.0 {
            for x in t.iter_mut() {
                *x *= k;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|&x| x == 0.0)
    }
}
