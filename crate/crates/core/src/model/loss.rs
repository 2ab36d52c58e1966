//! Mean squared logarithmic error. The log1p term makes an
//! underestimate of the FPS cost more than an equal overestimate.

use crate::error::{Error, Result};

/// mean over i of (log(y_i + 1) - log(yhat_i + 1))^2. Inputs must be
/// non-negative.
pub fn msle_loss(predicted: &[f64], measured: &[f64]) -> Result<f64> {
    if predicted.is_empty() {
        return Err(Error::EmptyInput("msle_loss needs at least one pair"));
    }
    if predicted.len() != measured.len() {
        return Err(Error::DimensionMismatch {
            expected: measured.len(),
            got: predicted.len(),
        });
    }
    let mut acc = 0.0;
    for (&p, &m) in predicted.iter().zip(measured) {
        if p < 0.0 || m < 0.0 {
            return Err(Error::invalid("msle", "negative input"));
        }
        let d = m.ln_1p() - p.ln_1p();
        acc += d * d;
    }
    Ok(acc / predicted.len() as f64)
}

/// log1p extended linearly below zero. Used during training where raw
/// network outputs can be transiently negative; C^1 at zero.
pub fn safe_log1p(t: f64) -> f64 {
    if t >= 0.0 {
        t.ln_1p()
    } else {
        t
    }
}

pub fn safe_log1p_grad(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + t)
    } else {
        1.0
    }
}
