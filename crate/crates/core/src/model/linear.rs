//! Ordinary-least-squares baseline on the same inputs as the network,
//! fitted against log(FPS + 1) targets for comparability with MSLE.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::eval::{evaluate_error_with, ErrorReport};
use super::mlp::InputNorm;
use super::TrainingSample;
use crate::error::{Error, Result};
use crate::platform::{ClusterKind, Gesture};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearModel {
    pub gesture: Gesture,
    pub intercept: f64,
    pub coeffs: Vec<f64>,
    pub input_norm: InputNorm,
    /// Set when the normal matrix was singular and a small ridge term
    /// was added.
    pub ridge_fallback: bool,
}

impl LinearModel {
    fn encode(&self, pcs: &[f64], event_rate: f64, cluster: ClusterKind, frequency: f64) -> Vec<f64> {
        let mut x = Vec::with_capacity(pcs.len() + 3);
        x.extend_from_slice(pcs);
        x.push(self.input_norm.rate(event_rate));
        x.push(cluster.label());
        x.push(self.input_norm.freq(frequency));
        x
    }

    pub fn predict_fps(
        &self,
        pcs: &[f64],
        event_rate: f64,
        cluster: ClusterKind,
        frequency: f64,
    ) -> Result<f64> {
        if pcs.len() + 3 != self.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.len(),
                got: pcs.len() + 3,
            });
        }
        let x = self.encode(pcs, event_rate, cluster, frequency);
        let log_fps =
            self.intercept + x.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum::<f64>();
        Ok(log_fps.exp_m1().max(0.0))
    }

    pub fn evaluate_error(&self, samples: &[TrainingSample]) -> Result<ErrorReport> {
        evaluate_error_with(samples, |s| {
            self.predict_fps(&s.pcs, s.event_rate, s.cluster, s.frequency)
        })
    }
}

pub fn fit_linear_baseline(samples: &[TrainingSample]) -> Result<LinearModel> {
    let Some(first) = samples.first() else {
        return Err(Error::EmptyInput("fit_linear_baseline needs samples"));
    };
    let k = first.pcs.len();
    let d = k + 3;
    if samples.len() <= d {
        return Err(Error::invalid(
            "samples",
            format!("need more than {d} samples for {d} inputs, got {}", samples.len()),
        ));
    }

    let input_norm = InputNorm {
        rate_min: samples.iter().map(|s| s.event_rate).fold(f64::INFINITY, f64::min),
        rate_max: samples.iter().map(|s| s.event_rate).fold(f64::NEG_INFINITY, f64::max),
        freq_min: samples.iter().map(|s| s.frequency).fold(f64::INFINITY, f64::min),
        freq_max: samples.iter().map(|s| s.frequency).fold(f64::NEG_INFINITY, f64::max),
    };

    let probe = LinearModel {
        gesture: first.gesture,
        intercept: 0.0,
        coeffs: vec![0.0; d],
        input_norm,
        ridge_fallback: false,
    };

    let n = samples.len();
    let x = DMatrix::from_fn(n, d + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            let s = &samples[i];
            probe.encode(&s.pcs, s.event_rate, s.cluster, s.frequency)[j - 1]
        }
    });
    let y = DVector::from_iterator(n, samples.iter().map(|s| s.measured_fps.ln_1p()));

    let xtx = x.transpose() * &x;
    let xty = x.transpose() * y;
    let (beta, ridge_fallback) = match xtx.clone().cholesky() {
        Some(chol) => (chol.solve(&xty), false),
        None => {
            let mut ridged = xtx;
            for i in 0..d + 1 {
                ridged[(i, i)] += 1e-6;
            }
            let chol = ridged
                .cholesky()
                .ok_or_else(|| Error::invalid("ols", "normal matrix not positive definite even with ridge"))?;
            (chol.solve(&xty), true)
        }
    };

    Ok(LinearModel {
        gesture: first.gesture,
        intercept: beta[0],
        coeffs: beta.iter().skip(1).cloned().collect(),
        input_norm: probe.input_norm,
        ridge_fallback,
    })
}
