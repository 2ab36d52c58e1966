//! Platform spec schema, validation, and the two shipped fixtures.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Gesture;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterKind {
    Little,
    Big,
}

impl ClusterKind {
    pub fn name(self) -> &'static str {
        match self {
            ClusterKind::Little => "little",
            ClusterKind::Big => "big",
        }
    }

    /// 0 for little, 1 for big; the model's cluster input.
    pub fn label(self) -> f64 {
        match self {
            ClusterKind::Little => 0.0,
            ClusterKind::Big => 1.0,
        }
    }

    pub fn other(self) -> ClusterKind {
        match self {
            ClusterKind::Little => ClusterKind::Big,
            ClusterKind::Big => ClusterKind::Little,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ClusterSpec {
    pub name: String,
    pub kind: ClusterKind,
    /// Frequency ladder in GHz, strictly increasing.
    pub frequencies: Vec<f64>,
    /// Rendering throughput per GHz.
    pub ipc_factor: f64,
    pub static_power_w: f64,
    pub dyn_coeff_w_per_ghz3: f64,
}

impl ClusterSpec {
    pub fn min_freq(&self) -> f64 {
        self.frequencies[0]
    }

    pub fn max_freq(&self) -> f64 {
        *self.frequencies.last().unwrap()
    }
}

/// One hardware configuration: where rendering runs and at what clock,
/// plus the opposite cluster's clock for everything else.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ProcessorSetting {
    pub render_cluster: ClusterKind,
    pub render_freq: f64,
    pub other_freq: f64,
}

/// Coefficients of the analytic ground-truth oracle.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OracleCoefficients {
    /// Base frame cost in milliseconds (at ipc*freq = 1).
    pub a0_base_ms: f64,
    /// Cost per unit of page complexity.
    pub a1_complexity: f64,
    /// Cost per px/s of event rate.
    pub a2_event_rate: f64,
    /// FPS measurement noise (stddev); 0 disables.
    pub noise_sigma: f64,
    /// Event-rate multiplier applied for pinch gestures.
    #[serde(default = "default_pinch_factor")]
    pub pinch_rate_factor: f64,
}

fn default_pinch_factor() -> f64 {
    1.3
}

impl OracleCoefficients {
    pub fn gesture_rate(&self, gesture: Gesture, event_rate: f64) -> f64 {
        match gesture {
            Gesture::Scroll => event_rate,
            Gesture::Pinch => event_rate * self.pinch_rate_factor,
        }
    }
}

/// Weights mapping raw web features to the workload complexity scalar.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ComplexityWeights {
    pub nodes: f64,
    pub kb: f64,
    pub css_rules: f64,
    pub img_tags: f64,
    pub scale: f64,
}

impl Default for ComplexityWeights {
    fn default() -> Self {
        ComplexityWeights {
            nodes: 1.0,
            kb: 0.5,
            css_rules: 0.3,
            img_tags: 2.0,
            scale: 0.001,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PlatformSpec {
    pub name: String,
    pub big: ClusterSpec,
    pub little: ClusterSpec,
    #[serde(default = "default_fps_cap")]
    pub fps_cap: f64,
    /// Ordered processor settings; empty means "derive from the ladders"
    /// (every little frequency with big parked at its minimum, every big
    /// frequency with little parked at its minimum).
    #[serde(default)]
    pub setting_table: Vec<ProcessorSetting>,
    pub oracle: OracleCoefficients,
    #[serde(default = "default_overhead_ms")]
    pub reconfiguration_overhead_ms: f64,
    /// Fixed utilization of the non-render cluster.
    #[serde(default = "default_background_util")]
    pub background_utilization: f64,
    #[serde(default)]
    pub complexity_weights: Option<ComplexityWeights>,
}

fn default_fps_cap() -> f64 {
    60.0
}

fn default_overhead_ms() -> f64 {
    10.0
}

fn default_background_util() -> f64 {
    0.1
}

impl PlatformSpec {
    pub fn cluster(&self, kind: ClusterKind) -> &ClusterSpec {
        match kind {
            ClusterKind::Little => &self.little,
            ClusterKind::Big => &self.big,
        }
    }

    pub fn complexity_weights(&self) -> ComplexityWeights {
        self.complexity_weights.clone().unwrap_or_default()
    }

    /// The setting table, sorted by render frequency ascending (ties:
    /// little before big).
    pub fn settings(&self) -> Vec<ProcessorSetting> {
        let mut table = if self.setting_table.is_empty() {
            let mut t = Vec::new();
            for &f in &self.little.frequencies {
                t.push(ProcessorSetting {
                    render_cluster: ClusterKind::Little,
                    render_freq: f,
                    other_freq: self.big.min_freq(),
                });
            }
            for &f in &self.big.frequencies {
                t.push(ProcessorSetting {
                    render_cluster: ClusterKind::Big,
                    render_freq: f,
                    other_freq: self.little.min_freq(),
                });
            }
            t
        } else {
            self.setting_table.clone()
        };
        table.sort_by(|a, b| {
            a.render_freq
                .total_cmp(&b.render_freq)
                .then_with(|| a.render_cluster.label().total_cmp(&b.render_cluster.label()))
        });
        table
    }

    /// The highest-frequency setting: the fallback when nothing meets
    /// FPS_min. Ties broken toward the big cluster (higher throughput).
    pub fn max_setting(&self) -> ProcessorSetting {
        ProcessorSetting {
            render_cluster: ClusterKind::Big,
            render_freq: self.big.max_freq(),
            other_freq: self.little.min_freq(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (path, c) in [("big", &self.big), ("little", &self.little)] {
            if c.frequencies.is_empty() {
                return Err(Error::invalid("platform", format!("{path}.frequencies is empty")));
            }
            if !c.frequencies.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::invalid(
                    "platform",
                    format!("{path}.frequencies must be strictly increasing"),
                ));
            }
            if c.ipc_factor <= 0.0 {
                return Err(Error::invalid("platform", format!("{path}.ipc_factor must be > 0")));
            }
            if c.static_power_w < 0.0 {
                return Err(Error::invalid(
                    "platform",
                    format!("{path}.static_power_w must be >= 0"),
                ));
            }
            if c.dyn_coeff_w_per_ghz3 <= 0.0 {
                return Err(Error::invalid(
                    "platform",
                    format!("{path}.dyn_coeff_w_per_ghz3 must be > 0"),
                ));
            }
        }
        if self.big.kind != ClusterKind::Big || self.little.kind != ClusterKind::Little {
            return Err(Error::invalid("platform", "big/little cluster kinds are swapped"));
        }
        if self.big.ipc_factor <= self.little.ipc_factor {
            return Err(Error::invalid(
                "platform",
                "big.ipc_factor must exceed little.ipc_factor",
            ));
        }
        if self.fps_cap <= 0.0 {
            return Err(Error::invalid("platform", "fps_cap must be > 0"));
        }
        if self.settings().len() < 2 {
            return Err(Error::invalid("platform", "setting table needs at least 2 entries"));
        }
        for (i, s) in self.setting_table.iter().enumerate() {
            let render = self.cluster(s.render_cluster);
            let other = self.cluster(s.render_cluster.other());
            if !render.frequencies.iter().any(|&f| f == s.render_freq) {
                return Err(Error::invalid(
                    "platform",
                    format!("setting_table[{i}].render_freq {} not on the {} ladder", s.render_freq, render.name),
                ));
            }
            if !other.frequencies.iter().any(|&f| f == s.other_freq) {
                return Err(Error::invalid(
                    "platform",
                    format!("setting_table[{i}].other_freq {} not on the {} ladder", s.other_freq, other.name),
                ));
            }
        }
        let o = &self.oracle;
        if o.a0_base_ms <= 0.0 || o.a1_complexity <= 0.0 || o.a2_event_rate <= 0.0 {
            return Err(Error::invalid("platform", "oracle coefficients must be > 0"));
        }
        if o.noise_sigma < 0.0 {
            return Err(Error::invalid("platform", "oracle.noise_sigma must be >= 0"));
        }
        Ok(())
    }

    /// Odroid-XU3-like fixture: A15-like big cluster up to 2.0 GHz,
    /// A7-like little cluster up to 1.4 GHz.
    pub fn odroid_xu3_like() -> Self {
        let spec: PlatformSpec =
            serde_json::from_str(include_str!("../../../../platforms/odroid-xu3.json"))
                .expect("bundled xu3 fixture");
        spec.validate().expect("bundled xu3 fixture valid");
        spec
    }

    /// Jetson-TX2-like fixture: both clusters reach 2.0 GHz.
    pub fn jetson_tx2_like() -> Self {
        let spec: PlatformSpec =
            serde_json::from_str(include_str!("../../../../platforms/jetson-tx2.json"))
                .expect("bundled tx2 fixture");
        spec.validate().expect("bundled tx2 fixture valid");
        spec
    }
}

pub fn load_platform_spec(path: impl AsRef<Path>) -> Result<PlatformSpec> {
    let text = std::fs::read_to_string(path)?;
    let spec: PlatformSpec = serde_json::from_str(&text)?;
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xu3_fixture_ladders() {
        let p = PlatformSpec::odroid_xu3_like();
        assert_eq!(p.big.max_freq(), 2.0);
        assert_eq!(p.little.max_freq(), 1.4);
        assert_eq!(p.settings().len(), 14);
    }

    #[test]
    fn tx2_fixture_ladders() {
        let p = PlatformSpec::jetson_tx2_like();
        assert_eq!(p.big.max_freq(), 2.0);
        assert_eq!(p.little.max_freq(), 2.0);
        assert_eq!(p.settings().len(), 14);
    }

    #[test]
    fn non_ascending_ladder_rejected() {
        let mut p = PlatformSpec::odroid_xu3_like();
        p.little.frequencies = vec![1.0, 0.8];
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("strictly increasing"), "{err}");
    }

    #[test]
    fn settings_sorted_by_render_freq() {
        let p = PlatformSpec::jetson_tx2_like();
        let s = p.settings();
        for w in s.windows(2) {
            assert!(w[0].render_freq <= w[1].render_freq);
        }
    }

    #[test]
    fn off_ladder_setting_rejected() {
        let mut p = PlatformSpec::odroid_xu3_like();
        p.setting_table = vec![
            ProcessorSetting {
                render_cluster: ClusterKind::Big,
                render_freq: 1.234,
                other_freq: p.little.min_freq(),
            },
            p.max_setting(),
        ];
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("setting_table[0]"), "{err}");
    }
}
