use alloc::vec::Vec;

/// Logistic function, evaluated on the branch that cannot overflow.
#[inline]
pub fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

pub fn sigmoid(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| sigmoid_scalar(v)).collect()
}

pub fn relu(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

/// Gradient through ReLU given the pre-activation.
pub fn relu_backward(pre: &[f64], grad_out: &[f64]) -> Vec<f64> {
    pre.iter()
        .zip(grad_out)
        .map(|(&z, &g)| if z > 0.0 { g } else { 0.0 })
        .collect()
}

/// Gradient through the sigmoid given its output `s`.
pub fn sigmoid_backward(out: &[f64], grad_out: &[f64]) -> Vec<f64> {
    out.iter().zip(grad_out).map(|(&s, &g)| g * s * (1.0 - s)).collect()
}
