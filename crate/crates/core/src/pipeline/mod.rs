//! Feature reduction pipeline: min-max scaling with clipping, PCA to a
//! variance target, Varimax rotation for loading interpretation, and
//! information-gain-ratio importance.

mod gain_ratio;
mod pca;
mod scaler;
mod varimax;

pub use gain_ratio::gain_ratio_importance;
pub use pca::{apply_pca, fit_pca, PcaTransform};
pub use scaler::{apply_scaler, fit_scaler, ScalerParams};
pub use varimax::varimax_rotate;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Fitted scaler + PCA pair, serialized beside every trained model so
/// deployment applies the exact training-time transform.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureTransform {
    pub manifest_version: String,
    pub scaler: ScalerParams,
    pub pca: PcaTransform,
}

impl FeatureTransform {
    /// Fits scaler then PCA (in that order) on raw feature rows.
    pub fn fit(
        rows: &[Vec<f64>],
        manifest_version: &str,
        variance_target: f64,
        k_max: usize,
    ) -> Result<Self> {
        let scaler = fit_scaler(rows)?;
        let scaled: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| apply_scaler(r, &scaler))
            .collect::<Result<_>>()?;
        let pca = fit_pca(&scaled, variance_target, k_max)?;
        Ok(FeatureTransform {
            manifest_version: manifest_version.to_string(),
            scaler,
            pca,
        })
    }

    /// Raw feature vector -> principal components.
    pub fn project(&self, raw: &[f64]) -> Result<Vec<f64>> {
        let scaled = apply_scaler(raw, &self.scaler)?;
        apply_pca(&scaled, &self.pca)
    }

    pub fn n_components(&self) -> usize {
        self.pca.k
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Per raw feature: Varimax loading contribution and gain ratio.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub feature_names: Vec<String>,
    pub varimax_contribution: Vec<f64>,
    pub gain_ratio: Vec<f64>,
}

impl ImportanceReport {
    /// Builds the importance report: rotates the PCA loadings with
    /// Varimax and sums each raw feature's squared rotated loadings,
    /// then scores each feature's gain ratio against the FPS targets.
    pub fn compute(
        transform: &FeatureTransform,
        raw_rows: &[Vec<f64>],
        fps_targets: &[f64],
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let k = transform.pca.k;
        let d = transform.scaler.min.len();
        // loadings: d x k, component rows scaled by sqrt(explained variance)
        let mut loadings = vec![vec![0.0; k]; d];
        for (j, comp) in transform.pca.components.iter().enumerate() {
            let w = transform.pca.explained_variance_ratio[j].sqrt();
            for (i, &c) in comp.iter().enumerate() {
                loadings[i][j] = c * w;
            }
        }
        let rotated = varimax_rotate(&loadings, 100, 1e-6);
        let varimax_contribution: Vec<f64> = rotated
            .iter()
            .map(|row| row.iter().map(|x| x * x).sum())
            .collect();
        let gain_ratio = gain_ratio_importance(raw_rows, fps_targets, 10)?;
        Ok(ImportanceReport {
            feature_names,
            varimax_contribution,
            gain_ratio,
        })
    }
}
