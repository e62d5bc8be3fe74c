//! Multi-label losses over sigmoid outputs, averaged over classes.
//!
//! Every loss returns its value together with the gradient with respect to
//! the predicted probabilities. Probabilities are clamped to
//! `[PROB_CLAMP, 1 - PROB_CLAMP]` and the gradient is taken at the clamped
//! value.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vocab::NUM_LABELS;

pub const PROB_CLAMP: f64 = 1e-7;
pub const DEFAULT_FOCAL_ALPHA: f64 = 0.25;
pub const DEFAULT_FOCAL_GAMMA: f64 = 2.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LossSpec {
    #[default]
    Bce,
    WeightedBce {
        weights: Vec<f64>,
    },
    Focal {
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_gamma")]
        gamma: f64,
    },
}

fn default_alpha() -> f64 {
    DEFAULT_FOCAL_ALPHA
}

fn default_gamma() -> f64 {
    DEFAULT_FOCAL_GAMMA
}

impl LossSpec {
    pub fn focal_default() -> Self {
        LossSpec::Focal {
            alpha: DEFAULT_FOCAL_ALPHA,
            gamma: DEFAULT_FOCAL_GAMMA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LossSpec::Bce => Ok(()),
            LossSpec::WeightedBce { weights } => {
                if weights.len() != NUM_LABELS {
                    return Err(Error::ShapeMismatch {
                        context: "class weights",
                        expected: NUM_LABELS,
                        actual: weights.len(),
                    });
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::InvalidParameter(
                        "class weights must be positive and finite".into(),
                    ));
                }
                Ok(())
            }
            LossSpec::Focal { alpha, gamma } => {
                if !(gamma.is_finite() && *gamma >= 0.0) {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "focal gamma must be >= 0, got {gamma}"
                    )));
                }
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "focal alpha must be > 0, got {alpha}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn evaluate(&self, pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self {
            LossSpec::Bce => bce_loss(pred, target, None),
            LossSpec::WeightedBce { weights } => bce_loss(pred, target, Some(weights)),
            LossSpec::Focal { alpha, gamma } => focal_loss(pred, target, *alpha, *gamma),
        }
    }
}

fn check_shapes(pred: &[f64], target: &[f64]) -> Result<()> {
    if pred.len() != target.len() {
        return Err(Error::ShapeMismatch {
            context: "loss target",
            expected: pred.len(),
            actual: target.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::ShapeMismatch {
            context: "loss prediction",
            expected: NUM_LABELS,
            actual: 0,
        });
    }
    Ok(())
}

#[inline]
fn clamp(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

pub fn bce_loss(pred: &[f64], target: &[f64], weights: Option<&[f64]>) -> Result<(f64, Vec<f64>)> {
    check_shapes(pred, target)?;
    if let Some(w) = weights {
        if w.len() != pred.len() {
            return Err(Error::ShapeMismatch {
                context: "class weights",
                expected: pred.len(),
                actual: w.len(),
            });
        }
    }
    let n = pred.len() as f64;
    let mut total = 0.0;
    let mut grad = Vec::with_capacity(pred.len());
    for (c, (&p, &y)) in pred.iter().zip(target).enumerate() {
        let w = weights.map_or(1.0, |w| w[c]);
        let p = clamp(p);
        total += -w * (y * libm::log(p) + (1.0 - y) * libm::log(1.0 - p));
        grad.push(-w * (y / p - (1.0 - y) / (1.0 - p)) / n);
    }
    Ok((total / n, grad))
}

pub fn focal_loss(pred: &[f64], target: &[f64], alpha: f64, gamma: f64) -> Result<(f64, Vec<f64>)> {
    check_shapes(pred, target)?;
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "focal gamma must be >= 0, got {gamma}"
        )));
    }
    let n = pred.len() as f64;
    let mut total = 0.0;
    let mut grad = Vec::with_capacity(pred.len());
    for (&p, &y) in pred.iter().zip(target) {
        let p = clamp(p);
        // Soft targets interpolate the y=1 and y=0 terms.
        let mut g = 0.0;
        for (pt, sign, weight) in [(p, 1.0, y), (1.0 - p, -1.0, 1.0 - y)] {
            if weight == 0.0 {
                continue;
            }
            let q = 1.0 - pt;
            let log_pt = libm::log(pt);
            total += -weight * alpha * libm::pow(q, gamma) * log_pt;
            let modulating_grad = if gamma == 0.0 {
                0.0
            } else {
                gamma * libm::pow(q, gamma - 1.0) * log_pt
            };
            let dl_dpt = -alpha * (libm::pow(q, gamma) / pt - modulating_grad);
            g += weight * sign * dl_dpt;
        }
        grad.push(g / n);
    }
    Ok((total / n, grad))
}
