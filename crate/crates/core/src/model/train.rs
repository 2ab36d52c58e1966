//! Backpropagation with minibatch Adam on the MSLE objective.

use rand::seq::SliceRandom;

use super::loss::{safe_log1p, safe_log1p_grad};
use super::mlp::{InputNorm, MlpModel};
use super::{ModelConfig, TrainingSample};
use crate::error::{Error, Result};
use crate::rng::substream;

#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            weights: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    fn reset(&mut self) {
        for w in &mut self.weights {
            w.fill(0.0);
        }
        for b in &mut self.biases {
            b.fill(0.0);
        }
    }
}

struct Workspace {
    /// Post-activation values per layer boundary (acts[0] is the input).
    acts: Vec<Vec<f64>>,
    /// Pre-activation values per layer.
    pres: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl Workspace {
    fn for_model(model: &MlpModel) -> Self {
        let sizes = &model.layer_sizes;
        Workspace {
            acts: sizes.iter().map(|&n| vec![0.0; n]).collect(),
            pres: sizes[1..].iter().map(|&n| vec![0.0; n]).collect(),
            deltas: sizes[1..].iter().map(|&n| vec![0.0; n]).collect(),
        }
    }
}

/// Forward + backward for one sample; accumulates gradients of the
/// per-sample squared-log error scaled by `scale` (1/batch for means).
/// Returns the unscaled per-sample loss term.
fn accumulate_sample(
    model: &MlpModel,
    input: &[f64],
    target_fps: f64,
    scale: f64,
    ws: &mut Workspace,
    grads: &mut Gradients,
) -> f64 {
    let last = model.n_layers() - 1;

    ws.acts[0].copy_from_slice(input);
    for l in 0..=last {
        let n_in = model.layer_sizes[l];
        let n_out = model.layer_sizes[l + 1];
        let w = &model.weights[l];
        // split borrows around the layer boundary
        let (head, tail) = ws.acts.split_at_mut(l + 1);
        let x = &head[l];
        let out = &mut tail[0];
        for o in 0..n_out {
            let row = &w[o * n_in..(o + 1) * n_in];
            let mut acc = model.biases[l][o];
            for i in 0..n_in {
                acc += row[i] * x[i];
            }
            ws.pres[l][o] = acc;
            out[o] = if l < last {
                model.activation.apply(acc)
            } else {
                acc
            };
        }
    }

    let raw_out = ws.acts[last + 1][0];
    let diff = safe_log1p(raw_out) - target_fps.ln_1p();
    let loss = diff * diff;

    // output delta: d(loss)/d(raw_out), scaled
    ws.deltas[last][0] = 2.0 * diff * safe_log1p_grad(raw_out) * scale;

    for l in (0..=last).rev() {
        let n_in = model.layer_sizes[l];
        let n_out = model.layer_sizes[l + 1];
        let w = &model.weights[l];
        let (head, tail) = ws.deltas.split_at_mut(l);
        let delta = &tail[0];
        let x = &ws.acts[l];
        let gw = &mut grads.weights[l];
        for o in 0..n_out {
            let d = delta[o];
            if d == 0.0 {
                continue;
            }
            grads.biases[l][o] += d;
            let row = &mut gw[o * n_in..(o + 1) * n_in];
            for i in 0..n_in {
                row[i] += d * x[i];
            }
        }
        if l > 0 {
            let prev = &mut head[l - 1];
            prev.fill(0.0);
            for o in 0..n_out {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let row = &w[o * n_in..(o + 1) * n_in];
                for i in 0..n_in {
                    prev[i] += d * row[i];
                }
            }
            let pre_prev = &ws.pres[l - 1];
            for i in 0..n_in {
                prev[i] *= model.activation.grad(pre_prev[i]);
            }
        }
    }
    loss
}

/// Mean MSLE over the batch plus its analytic gradients. Gradient-check
/// entry point: independent callers can compare these against finite
/// differences on the same model.
pub fn batch_loss_and_gradients(
    model: &MlpModel,
    inputs: &[Vec<f64>],
    target_fps: &[f64],
) -> (f64, Gradients) {
    assert_eq!(inputs.len(), target_fps.len());
    let n = inputs.len() as f64;
    let mut ws = Workspace::for_model(model);
    let mut grads = Gradients::zeros_like(model);
    let mut loss = 0.0;
    for (x, &y) in inputs.iter().zip(target_fps) {
        loss += accumulate_sample(model, x, y, 1.0 / n, &mut ws, &mut grads);
    }
    (loss / n, grads)
}

fn init_model(
    samples: &[TrainingSample],
    cfg: &ModelConfig,
    transform_version: &str,
) -> MlpModel {
    use rand::Rng;
    let k = samples[0].pcs.len();
    let input_dim = k + 3;
    let mut layer_sizes = vec![input_dim];
    layer_sizes.extend(std::iter::repeat(cfg.hidden_width).take(cfg.hidden_layers));
    layer_sizes.push(1);

    let rate_min = samples.iter().map(|s| s.event_rate).fold(f64::INFINITY, f64::min);
    let rate_max = samples.iter().map(|s| s.event_rate).fold(f64::NEG_INFINITY, f64::max);
    let freq_min = samples.iter().map(|s| s.frequency).fold(f64::INFINITY, f64::min);
    let freq_max = samples.iter().map(|s| s.frequency).fold(f64::NEG_INFINITY, f64::max);

    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for l in 0..layer_sizes.len() - 1 {
        let fan_in = layer_sizes[l];
        let fan_out = layer_sizes[l + 1];
        let bound = (6.0 / fan_in as f64).sqrt();
        let mut rng = substream(cfg.seed, &format!("init/layer{l}"));
        let w: Vec<f64> = (0..fan_in * fan_out)
            .map(|_| rng.gen_range(-bound..bound))
            .collect();
        weights.push(w);
        biases.push(vec![0.0; fan_out]);
    }

    MlpModel {
        gesture: samples[0].gesture,
        layer_sizes,
        weights,
        biases,
        activation: cfg.activation,
        input_norm: InputNorm {
            rate_min,
            rate_max,
            freq_min,
            freq_max,
        },
        transform_version: transform_version.to_string(),
        final_train_loss: None,
    }
}

/// Trains a per-gesture model with minibatch Adam on MSLE. epochs = 0
/// returns the seeded initialization unchanged.
pub fn train(
    samples: &[TrainingSample],
    cfg: &ModelConfig,
    transform_version: &str,
) -> Result<MlpModel> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::EmptyInput("train needs samples"));
    }
    let gesture = samples[0].gesture;
    if samples.iter().any(|s| s.gesture != gesture) {
        return Err(Error::invalid("samples", "mixed gestures in one training set"));
    }
    let k = samples[0].pcs.len();
    if samples.iter().any(|s| s.pcs.len() != k) {
        return Err(Error::invalid("samples", "inconsistent PC dimension"));
    }

    let mut model = init_model(samples, cfg, transform_version);
    if cfg.epochs == 0 {
        return Ok(model);
    }

    let inputs: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| model.encode_input(&s.pcs, s.event_rate, s.cluster, s.frequency))
        .collect::<Result<_>>()?;
    let log_targets: Vec<f64> = samples.iter().map(|s| s.measured_fps).collect();
    for s in samples {
        if !(s.measured_fps.is_finite() && s.measured_fps >= 0.0) {
            return Err(Error::invalid("samples", "measured_fps must be finite and >= 0"));
        }
    }

    let mut ws = Workspace::for_model(&model);
    let mut grads = Gradients::zeros_like(&model);
    let mut m1 = Gradients::zeros_like(&model);
    let mut m2 = Gradients::zeros_like(&model);
    let mut step = 0usize;
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut shuffle_rng = substream(cfg.seed, "shuffle");
    let mut final_loss = f64::NAN;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grads.reset();
            let scale = 1.0 / batch.len() as f64;
            let mut batch_loss = 0.0;
            for &idx in batch {
                batch_loss +=
                    accumulate_sample(&model, &inputs[idx], log_targets[idx], scale, &mut ws, &mut grads);
            }
            epoch_loss += batch_loss;
            if !batch_loss.is_finite() {
                return Err(Error::Diverged(format!(
                    "non-finite loss at epoch {epoch} (gesture {})",
                    gesture.name()
                )));
            }

            step += 1;
            let bc1 = 1.0 - cfg.beta1.powi(step as i32);
            let bc2 = 1.0 - cfg.beta2.powi(step as i32);
            for l in 0..model.weights.len() {
                adam_update(
                    &mut model.weights[l],
                    &grads.weights[l],
                    &mut m1.weights[l],
                    &mut m2.weights[l],
                    cfg,
                    bc1,
                    bc2,
                );
                adam_update(
                    &mut model.biases[l],
                    &grads.biases[l],
                    &mut m1.biases[l],
                    &mut m2.biases[l],
                    cfg,
                    bc1,
                    bc2,
                );
            }
        }
        final_loss = epoch_loss / samples.len() as f64;
    }

    model.final_train_loss = Some(final_loss);
    Ok(model)
}

#[inline]
fn adam_update(
    params: &mut [f64],
    grads: &[f64],
    m1: &mut [f64],
    m2: &mut [f64],
    cfg: &ModelConfig,
    bias_correction1: f64,
    bias_correction2: f64,
) {
    for i in 0..params.len() {
        let g = grads[i];
        m1[i] = cfg.beta1 * m1[i] + (1.0 - cfg.beta1) * g;
        m2[i] = cfg.beta2 * m2[i] + (1.0 - cfg.beta2) * g * g;
        let mhat = m1[i] / bias_correction1;
        let vhat = m2[i] / bias_correction2;
        params[i] -= cfg.learning_rate * mhat / (vhat.sqrt() + cfg.epsilon);
    }
}
