//! Feed-forward regressor structure and forward pass. Hidden layers use
//! the configured activation, the output layer is linear; predictions
//! are clamped at zero from below.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::platform::{ClusterKind, Gesture};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Tanh,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            Activation::Tanh => x.tanh(),
        }
    }

    /// Derivative expressed in terms of the pre-activation value.
    #[inline]
    pub fn grad(self, pre: f64) -> f64 {
        match self {
            Activation::Relu => {
                if pre > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = 1.0 / (1.0 + (-pre).exp());
                s * (1.0 - s)
            }
            Activation::Tanh => 1.0 - pre.tanh().powi(2),
        }
    }
}

/// Min-max bounds for the scalar inputs, recorded from the training set.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InputNorm {
    pub rate_min: f64,
    pub rate_max: f64,
    pub freq_min: f64,
    pub freq_max: f64,
}

impl InputNorm {
    fn scale(lo: f64, hi: f64, v: f64) -> f64 {
        if hi <= lo {
            0.0
        } else {
            (v.clamp(lo, hi) - lo) / (hi - lo)
        }
    }

    pub fn rate(&self, v: f64) -> f64 {
        Self::scale(self.rate_min, self.rate_max, v)
    }

    pub fn freq(&self, v: f64) -> f64 {
        Self::scale(self.freq_min, self.freq_max, v)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MlpModel {
    pub gesture: Gesture,
    /// [input_dim, hidden..., 1]
    pub layer_sizes: Vec<usize>,
    /// Per layer: out x in, row-major.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub activation: Activation,
    pub input_norm: InputNorm,
    /// Version tag of the FeatureTransform this model was trained with.
    pub transform_version: String,
    pub final_train_loss: Option<f64>,
}

impl MlpModel {
    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    /// Assembles the network input: PCs, scaled event rate, cluster
    /// label, scaled frequency.
    pub fn encode_input(
        &self,
        pcs: &[f64],
        event_rate: f64,
        cluster: ClusterKind,
        frequency: f64,
    ) -> Result<Vec<f64>> {
        if pcs.len() + 3 != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: pcs.len() + 3,
            });
        }
        if !(event_rate.is_finite() && frequency.is_finite()) || frequency <= 0.0 {
            return Err(Error::invalid("predict input", "event_rate/frequency must be finite, frequency > 0"));
        }
        if pcs.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("predict input", "non-finite principal component"));
        }
        let mut x = Vec::with_capacity(self.input_dim());
        x.extend_from_slice(pcs);
        x.push(self.input_norm.rate(event_rate));
        x.push(cluster.label());
        x.push(self.input_norm.freq(frequency));
        Ok(x)
    }

    /// Raw forward pass (output not clamped).
    pub fn forward(&self, input: &[f64]) -> f64 {
        debug_assert_eq!(input.len(), self.input_dim());
        let mut cur = input.to_vec();
        let last = self.n_layers() - 1;
        for l in 0..=last {
            let n_out = self.layer_sizes[l + 1];
            let n_in = self.layer_sizes[l];
            let w = &self.weights[l];
            let mut next = Vec::with_capacity(n_out);
            for o in 0..n_out {
                let row = &w[o * n_in..(o + 1) * n_in];
                let mut acc = self.biases[l][o];
                for (wi, xi) in row.iter().zip(&cur) {
                    acc += wi * xi;
                }
                next.push(if l < last { self.activation.apply(acc) } else { acc });
            }
            cur = next;
        }
        cur[0]
    }

    /// Deterministic FPS prediction, clamped at 0 from below.
    pub fn predict_fps(
        &self,
        pcs: &[f64],
        event_rate: f64,
        cluster: ClusterKind,
        frequency: f64,
    ) -> Result<f64> {
        let x = self.encode_input(pcs, event_rate, cluster, frequency)?;
        Ok(self.forward(&x).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tiny_model() -> MlpModel {
        // 1 input -> 1 hidden (relu) -> 1 output
        MlpModel {
            gesture: Gesture::Scroll,
            layer_sizes: vec![1, 1, 1],
            weights: vec![vec![2.0], vec![3.0]],
            biases: vec![vec![-1.0], vec![0.5]],
            activation: Activation::Relu,
            input_norm: InputNorm {
                rate_min: 0.0,
                rate_max: 1.0,
                freq_min: 0.0,
                freq_max: 1.0,
            },
            transform_version: "t".into(),
            final_train_loss: None,
        }
    }

    #[test]
    fn hand_forward_pass() {
        let m = tiny_model();
        // x=2: hidden = relu(2*2 - 1) = 3; out = 3*3 + 0.5 = 9.5
        assert_abs_diff_eq!(m.forward(&[2.0]), 9.5, epsilon = 1e-12);
        // x=0: hidden = relu(-1) = 0; out = 0.5
        assert_abs_diff_eq!(m.forward(&[0.0]), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn zero_weights_predict_output_bias() {
        let mut m = tiny_model();
        m.layer_sizes = vec![4, 2, 1];
        m.weights = vec![vec![0.0; 8], vec![0.0; 2]];
        m.biases = vec![vec![0.0; 2], vec![7.5]];
        let p = m
            .predict_fps(&[1.0], 500.0, ClusterKind::Big, 1.5)
            .unwrap();
        assert_eq!(p, 7.5);
    }

    #[test]
    fn prediction_clamped_at_zero() {
        let mut m = tiny_model();
        m.biases[1][0] = -100.0;
        m.layer_sizes = vec![4, 1, 1];
        m.weights = vec![vec![0.0; 4], vec![0.0]];
        m.biases[0] = vec![0.0];
        let p = m.predict_fps(&[0.0], 1.0, ClusterKind::Little, 1.0).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn dimension_and_finiteness_errors() {
        let mut m = tiny_model();
        m.layer_sizes = vec![4, 1, 1];
        m.weights = vec![vec![0.0; 4], vec![0.0]];
        m.biases = vec![vec![0.0], vec![0.0]];
        assert!(m.predict_fps(&[0.0, 0.0], 1.0, ClusterKind::Big, 1.0).is_err());
        assert!(m.predict_fps(&[f64::NAN], 1.0, ClusterKind::Big, 1.0).is_err());
        assert!(m.predict_fps(&[0.0], 1.0, ClusterKind::Big, 0.0).is_err());
    }
}
