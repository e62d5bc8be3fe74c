use alloc::vec::Vec;

use super::rng::Rng;

/// Per-entry multipliers recorded by a training-mode dropout pass: `0` for
/// dropped entries and `1/(1-p)` for survivors.
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMask(pub Vec<f64>);

impl DropoutMask {
    pub fn ones(len: usize) -> Self {
        Self(alloc::vec![1.0; len])
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.0).map(|(v, m)| v * m).collect()
    }

    /// The backward pass is the same elementwise product.
    pub fn backward(&self, grad: &[f64]) -> Vec<f64> {
        self.apply(grad)
    }
}

/// Inverted dropout. Inference mode, or `p == 0`, returns the input and an
/// all-ones mask without drawing from `rng`.
pub fn dropout(x: &[f64], p: f64, rng: &mut Rng, training: bool) -> (Vec<f64>, DropoutMask) {
    assert!((0.0..1.0).contains(&p), "dropout probability must lie in [0, 1)");
    if !training || p == 0.0 {
        return (x.to_vec(), DropoutMask::ones(x.len()));
    }
    let keep = 1.0 / (1.0 - p);
    let mask = DropoutMask(
        (0..x.len())
            .map(|_| if rng.next_f64() < p { 0.0 } else { keep })
            .collect(),
    );
    (mask.apply(x), mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_cases() {
        let x = [1.0, -2.0, 3.0];
        let mut rng = Rng::new(1);
        assert_eq!(dropout(&x, 0.2, &mut rng, false).0, x);
        assert_eq!(dropout(&x, 0.0, &mut rng, true).0, x);
    }

    #[test]
    fn zero_fraction_and_expectation() {
        let n = 100_000;
        let x = alloc::vec![1.0; n];
        let mut rng = Rng::new(2024);
        let (y, mask) = dropout(&x, 0.2, &mut rng, true);
        let zeros = y.iter().filter(|&&v| v == 0.0).count() as f64 / n as f64;
        assert!((zeros - 0.2).abs() <= 0.01, "zero fraction {zeros}");
        let mean = y.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean {mean}");
        assert_eq!(mask.backward(&x), y);
    }
}
