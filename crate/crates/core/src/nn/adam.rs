use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Gradients, Parameterized};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        Self { lr, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub t: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(config: AdamConfig, shapes: &[usize]) -> Self {
        Self {
            config,
            t: 0,
            m: shapes.iter().map(|&n| alloc::vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| alloc::vec![0.0; n]).collect(),
        }
    }

    pub fn for_model<M: Parameterized + ?Sized>(config: AdamConfig, model: &M) -> Self {
        let shapes: Vec<usize> = model.tensors().iter().map(|t| t.len()).collect();
        Self::new(config, &shapes)
    }

    /// One bias-corrected Adam update over every tensor.
    pub fn step(&mut self, params: Vec<&mut [f64]>, grads: &Gradients) -> Result<()> {
        if params.len() != self.m.len() || grads.0.len() != self.m.len() {
            return Err(Error::ShapeMismatch {
                context: "adam tensor count",
                expected: self.m.len(),
                actual: params.len().min(grads.0.len()),
            });
        }
        for ((p, g), m) in params.iter().zip(&grads.0).zip(&self.m) {
            if p.len() != m.len() || g.len() != m.len() {
                return Err(Error::ShapeMismatch {
                    context: "adam tensor",
                    expected: m.len(),
                    actual: if p.len() != m.len() { p.len() } else { g.len() },
                });
            }
        }
        self.t += 1;
        let AdamConfig { lr, beta1, beta2, eps } = self.config;
        let t = self.t as f64;
        let c1 = 1.0 - libm::pow(beta1, t);
        let c2 = 1.0 - libm::pow(beta2, t);
        for (((p, g), m), v) in params.into_iter().zip(&grads.0).zip(&mut self.m).zip(&mut self.v) {
            for i in 0..p.len() {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                p[i] -= lr * m_hat / (libm::sqrt(v_hat) + eps);
            }
        }
        Ok(())
    }

    pub fn step_model<M: Parameterized + ?Sized>(&mut self, model: &mut M, grads: &Gradients) -> Result<()> {
        self.step(model.tensors_mut(), grads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_step(state: &mut AdamState, x: &mut f64, g: f64) {
        let mut buf = [*x];
        state
            .step(alloc::vec![&mut buf[..]], &Gradients(alloc::vec![alloc::vec![g]]))
            .unwrap();
        *x = buf[0];
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut s = AdamState::new(AdamConfig::default(), &[3]);
        let mut p = [1.0, -2.0, 3.5];
        for _ in 0..5 {
            s.step(alloc::vec![&mut p[..]], &Gradients(alloc::vec![alloc::vec![0.0; 3]]))
                .unwrap();
        }
        assert_eq!(p, [1.0, -2.0, 3.5]);
        assert_eq!(s.t, 5);
    }

    #[test]
    fn first_step_is_lr() {
        // m̂ = g, v̂ = g², so the step is lr·g/(|g| + eps).
        let mut s = AdamState::new(AdamConfig::with_lr(0.1), &[1]);
        let mut x = 1.0;
        scalar_step(&mut s, &mut x, 1.0);
        let expected = 1.0 - 0.1 / (1.0 + 1e-8);
        assert!((x - expected).abs() < 1e-15);
    }

    #[test]
    fn minimises_square() {
        let mut s = AdamState::new(AdamConfig::with_lr(0.1), &[1]);
        let mut x = 5.0;
        for _ in 0..200 {
            let g = 2.0 * x;
            scalar_step(&mut s, &mut x, g);
        }
        assert!(x.abs() < 0.1, "x = {x}");
    }

    #[test]
    fn shape_errors() {
        let mut s = AdamState::new(AdamConfig::default(), &[2]);
        let mut p = [0.0; 3];
        assert!(s
            .step(alloc::vec![&mut p[..]], &Gradients(alloc::vec![alloc::vec![0.0; 3]]))
            .is_err());
        assert_eq!(s.t, 0);
    }
}
