//! Simulated big.LITTLE platforms: cluster/frequency descriptions, the
//! analytic FPS and power oracle standing in for hardware measurement,
//! and training-grid generation.

mod oracle;
mod spec;

pub use oracle::{
    default_event_rates, frame_time_ms, generate_training_grid, power_draw, render_utilization,
    true_fps, true_fps_clean,
};
pub use spec::{
    load_platform_spec, ClusterKind, ClusterSpec, ComplexityWeights, OracleCoefficients,
    PlatformSpec, ProcessorSetting,
};

use serde::{Deserialize, Serialize};

use crate::dom::{FeatureManifest, RawFeatureVector};
use crate::error::{Error, Result};

/// Scalar rendering cost of a page, derived from its raw features.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PageWorkload {
    pub id: String,
    pub complexity: f64,
}

impl PageWorkload {
    /// Weighted combination of node count, page size, CSS rule count,
    /// and image-tag count under the platform's complexity weights.
    pub fn from_features(
        id: impl Into<String>,
        raw: &RawFeatureVector,
        manifest: &FeatureManifest,
        weights: &ComplexityWeights,
    ) -> Result<Self> {
        if raw.values.len() != manifest.dimension() {
            return Err(Error::DimensionMismatch {
                expected: manifest.dimension(),
                got: raw.values.len(),
            });
        }
        let names = manifest.feature_names();
        let get = |name: &str| -> f64 {
            names
                .iter()
                .position(|n| n == name)
                .map(|i| raw.values[i])
                .unwrap_or(0.0)
        };
        let combo = weights.nodes * raw.values[0]
            + weights.kb * raw.values[raw.values.len() - 1]
            + weights.css_rules * raw.values[2]
            + weights.img_tags * get("tag:img");
        let complexity = combo * weights.scale;
        if !complexity.is_finite() {
            return Err(Error::invalid("complexity", "non-finite"));
        }
        Ok(PageWorkload {
            id: id.into(),
            complexity,
        })
    }
}

/// Supported interaction gestures; each gets its own model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gesture {
    Scroll,
    Pinch,
}

impl Gesture {
    pub const ALL: [Gesture; 2] = [Gesture::Scroll, Gesture::Pinch];

    pub fn name(self) -> &'static str {
        match self {
            Gesture::Scroll => "scroll",
            Gesture::Pinch => "pinch",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "scroll" => Some(Gesture::Scroll),
            "pinch" => Some(Gesture::Pinch),
            _ => None,
        }
    }
}
