use alloc::vec::Vec;

use super::rng::Rng;
use crate::error::{Error, Result};

/// Affine map `y = W x + b` with `W` stored row-major as `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    in_dim: usize,
    out_dim: usize,
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            weight: alloc::vec![0.0; in_dim * out_dim],
            bias: alloc::vec![0.0; out_dim],
        }
    }

    /// Glorot-uniform weights in `±sqrt(6 / (in + out))`, zero biases.
    pub fn glorot(in_dim: usize, out_dim: usize, rng: &mut Rng) -> Self {
        let limit = libm::sqrt(6.0 / (in_dim + out_dim) as f64);
        let mut layer = Self::zeros(in_dim, out_dim);
        for w in &mut layer.weight {
            *w = rng.uniform(-limit, limit);
        }
        layer
    }

    pub fn from_parts(in_dim: usize, out_dim: usize, weight: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if weight.len() != in_dim * out_dim {
            return Err(Error::ShapeMismatch {
                context: "dense weight",
                expected: in_dim * out_dim,
                actual: weight.len(),
            });
        }
        if bias.len() != out_dim {
            return Err(Error::ShapeMismatch {
                context: "dense bias",
                expected: out_dim,
                actual: bias.len(),
            });
        }
        Ok(Self {
            in_dim,
            out_dim,
            weight,
            bias,
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut layer = Self::zeros(dim, dim);
        for i in 0..dim {
            layer.weight[i * dim + i] = 1.0;
        }
        layer
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim {
            return Err(Error::ShapeMismatch {
                context: "dense input",
                expected: self.in_dim,
                actual: x.len(),
            });
        }
        Ok(self
            .weight
            .chunks_exact(self.in_dim)
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect())
    }

    /// Accumulates `dL/dW += g xᵀ` and `dL/db += g`, returns `dL/dx = Wᵀ g`.
    pub fn backward(&self, x: &[f64], grad_out: &[f64], grad_w: &mut [f64], grad_b: &mut [f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.in_dim);
        debug_assert_eq!(grad_out.len(), self.out_dim);
        let mut grad_x = alloc::vec![0.0; self.in_dim];
        for (o, &g) in grad_out.iter().enumerate() {
            grad_b[o] += g;
            if g == 0.0 {
                continue;
            }
            let row = &self.weight[o * self.in_dim..][..self.in_dim];
            let grow = &mut grad_w[o * self.in_dim..][..self.in_dim];
            for i in 0..self.in_dim {
                grow[i] += g * x[i];
                grad_x[i] += g * row[i];
            }
        }
        grad_x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_bias() {
        let x = [1.5, -2.0, 0.25];
        assert_eq!(DenseLayer::identity(3).forward(&x).unwrap(), x);
        let mut l = DenseLayer::zeros(3, 2);
        l.bias = alloc::vec![4.0, -1.0];
        assert_eq!(l.forward(&x).unwrap(), [4.0, -1.0]);
        assert!(matches!(l.forward(&[1.0]), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn random_3x2_matches_hand_multiply() {
        let mut rng = Rng::new(11);
        let mut l = DenseLayer::glorot(2, 3, &mut rng);
        l.bias = alloc::vec![0.1, -0.2, 0.3];
        let x = [0.7, -1.3];
        let y = l.forward(&x).unwrap();
        let w = &l.weight;
        let hand = [
            w[0] * x[0] + w[1] * x[1] + 0.1,
            w[2] * x[0] + w[3] * x[1] - 0.2,
            w[4] * x[0] + w[5] * x[1] + 0.3,
        ];
        for (a, b) in y.iter().zip(hand) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn squared_error_probe_gradient() {
        // L = |Wx + b - y|^2  =>  dL/dW = 2 (Wx + b - y) xᵀ, dL/db = 2 (Wx + b - y)
        let mut rng = Rng::new(5);
        let l = DenseLayer::glorot(4, 3, &mut rng);
        let x = [0.3, -0.1, 0.8, 1.2];
        let target = [0.5, 0.0, -0.5];
        let out = l.forward(&x).unwrap();
        let resid: Vec<f64> = out.iter().zip(target).map(|(o, t)| o - t).collect();
        let g: Vec<f64> = resid.iter().map(|r| 2.0 * r).collect();
        let mut gw = alloc::vec![0.0; 12];
        let mut gb = alloc::vec![0.0; 3];
        let gx = l.backward(&x, &g, &mut gw, &mut gb);
        for o in 0..3 {
            assert!((gb[o] - 2.0 * resid[o]).abs() < 1e-15);
            for i in 0..4 {
                assert!((gw[o * 4 + i] - 2.0 * resid[o] * x[i]).abs() < 1e-15);
            }
        }
        for (i, g) in gx.iter().enumerate() {
            let expected: f64 = (0..3).map(|o| l.weight[o * 4 + i] * 2.0 * resid[o]).sum();
            assert!((g - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn glorot_bounds() {
        let mut rng = Rng::new(0);
        let l = DenseLayer::glorot(10, 6, &mut rng);
        let lim = (6.0f64 / 16.0).sqrt();
        assert!(l.weight.iter().all(|w| w.abs() <= lim));
        assert!(l.bias.iter().all(|&b| b == 0.0));
    }
}
