//! Per-gesture FPS regressors: feed-forward network, MSLE loss, Adam
//! training, relative-error evaluation, five-fold cross-validation, and
//! an ordinary-least-squares baseline.

mod eval;
mod linear;
mod loss;
mod mlp;
mod train;

pub use eval::{cross_validate, evaluate_error, CvOptions, ErrorReport, FoldReport};
pub use linear::{fit_linear_baseline, LinearModel};
pub use loss::{msle_loss, safe_log1p, safe_log1p_grad};
pub use mlp::{Activation, InputNorm, MlpModel};
pub use train::{batch_loss_and_gradients, train, Gradients};

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::platform::{ClusterKind, Gesture};

/// Network and optimizer hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelConfig {
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub activation: Activation,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            hidden_layers: 5,
            hidden_width: 80,
            activation: Activation::Relu,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 300,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_layers < 1 {
            return Err(Error::invalid("config", "hidden_layers must be >= 1"));
        }
        if self.hidden_width < 1 {
            return Err(Error::invalid("config", "hidden_width must be >= 1"));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::invalid("config", "learning_rate must be > 0"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::invalid("config", "beta1/beta2 must be in [0, 1)"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("config", "batch_size must be >= 1"));
        }
        Ok(())
    }
}

/// One measured grid point: page PCs, interaction intensity, processor
/// placement, and the observed FPS.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrainingSample {
    pub pcs: Vec<f64>,
    pub event_rate: f64,
    pub cluster: ClusterKind,
    pub frequency: f64,
    pub measured_fps: f64,
    pub gesture: Gesture,
}

/// At most one trained model per gesture. A BTreeMap keeps saved files
/// byte-stable across runs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModelRegistry {
    models: BTreeMap<Gesture, MlpModel>,
}

impl ModelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, model: MlpModel) -> Result<()> {
        if self.models.contains_key(&model.gesture) {
            return Err(Error::invalid(
                "registry",
                format!("model for gesture {} already registered", model.gesture.name()),
            ));
        }
        self.models.insert(model.gesture, model);
        Ok(())
    }

    pub fn get(&self, gesture: Gesture) -> Option<&MlpModel> {
        self.models.get(&gesture)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Writes samples in the interchange CSV layout:
/// pc_0..pc_{k-1},event_rate,cluster,freq_ghz,fps,gesture
pub fn write_samples_csv(samples: &[TrainingSample], mut w: impl Write) -> Result<()> {
    let Some(first) = samples.first() else {
        return Err(Error::EmptyInput("no samples to write"));
    };
    let k = first.pcs.len();
    let mut header: Vec<String> = (0..k).map(|i| format!("pc_{i}")).collect();
    header.extend(
        ["event_rate", "cluster", "freq_ghz", "fps", "gesture"]
            .iter()
            .map(|s| s.to_string()),
    );
    writeln!(w, "{}", header.join(","))?;
    for s in samples {
        let mut fields: Vec<String> = s.pcs.iter().map(|v| format!("{v:.12e}")).collect();
        fields.push(format!("{:.6}", s.event_rate));
        fields.push(s.cluster.label().to_string());
        fields.push(format!("{:.6}", s.frequency));
        fields.push(format!("{:.12e}", s.measured_fps));
        fields.push(s.gesture.name().to_string());
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn read_samples_csv(r: impl BufRead) -> Result<Vec<TrainingSample>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or(Error::EmptyInput("empty samples CSV"))??;
    let cols: Vec<&str> = header.split(',').collect();
    let k = cols.iter().filter(|c| c.starts_with("pc_")).count();
    if cols.len() != k + 5 {
        return Err(Error::invalid("csv", format!("unexpected header: {header}")));
    }
    let mut samples = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != k + 5 {
            return Err(Error::invalid(
                "csv",
                format!("line {}: expected {} fields, got {}", lineno + 2, k + 5, fields.len()),
            ));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::invalid("csv", format!("bad number {s:?} on line {}", lineno + 2)))
        };
        let pcs: Vec<f64> = fields[..k].iter().map(|f| parse(f)).collect::<Result<_>>()?;
        let cluster = if parse(fields[k + 1])? > 0.5 {
            ClusterKind::Big
        } else {
            ClusterKind::Little
        };
        let gesture = Gesture::from_name(fields[k + 4])
            .ok_or_else(|| Error::invalid("csv", format!("unknown gesture {:?}", fields[k + 4])))?;
        samples.push(TrainingSample {
            pcs,
            event_rate: parse(fields[k])?,
            cluster,
            frequency: parse(fields[k + 2])?,
            measured_fps: parse(fields[k + 3])?,
            gesture,
        });
    }
    Ok(samples)
}
