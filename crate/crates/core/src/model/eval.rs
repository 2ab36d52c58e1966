//! Relative-error evaluation and page-level five-fold cross-validation.

use serde::{Deserialize, Serialize};

use super::{train, MlpModel, ModelConfig, TrainingSample};
use crate::error::{Error, Result};
use crate::pipeline::FeatureTransform;
use crate::platform::{generate_training_grid, Gesture, PageWorkload, PlatformSpec};

/// Per-sample relative FPS errors |measured - predicted| / measured.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorReport {
    pub per_sample: Vec<f64>,
    pub mean: f64,
    pub geometric_mean: f64,
    /// Samples with measured_fps = 0, excluded from the statistics.
    pub excluded_zero_measured: usize,
}

pub fn evaluate_error(model: &MlpModel, samples: &[TrainingSample]) -> Result<ErrorReport> {
    evaluate_error_with(samples, |s| {
        model.predict_fps(&s.pcs, s.event_rate, s.cluster, s.frequency)
    })
}

/// Shared error computation for any predictor (MLP or baseline).
pub(crate) fn evaluate_error_with(
    samples: &[TrainingSample],
    predict: impl Fn(&TrainingSample) -> Result<f64>,
) -> Result<ErrorReport> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("evaluate_error needs samples"));
    }
    let mut per_sample = Vec::with_capacity(samples.len());
    let mut excluded = 0usize;
    for s in samples {
        if s.measured_fps <= 0.0 {
            excluded += 1;
            continue;
        }
        let pred = predict(s)?;
        per_sample.push((s.measured_fps - pred).abs() / s.measured_fps);
    }
    if per_sample.is_empty() {
        return Err(Error::EmptyInput("all samples had measured_fps = 0"));
    }
    let n = per_sample.len() as f64;
    let mean = per_sample.iter().sum::<f64>() / n;
    let geometric_mean = if per_sample.iter().any(|&e| e == 0.0) {
        0.0
    } else {
        (per_sample.iter().map(|e| e.ln()).sum::<f64>() / n).exp()
    };
    Ok(ErrorReport {
        per_sample,
        mean,
        geometric_mean,
        excluded_zero_measured: excluded,
    })
}

#[derive(Debug, Clone)]
pub struct CvOptions {
    pub folds: usize,
    pub variance_target: f64,
    pub k_max: usize,
    pub rates: Vec<f64>,
    pub gesture: Gesture,
    pub seed: u64,
    /// Also fit the least-squares baseline per fold for comparison.
    pub with_linear: bool,
}

impl CvOptions {
    pub fn new(gesture: Gesture, rates: Vec<f64>, seed: u64) -> Self {
        CvOptions {
            folds: 5,
            variance_target: 0.95,
            k_max: 49,
            rates,
            gesture,
            seed,
            with_linear: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_train_pages: usize,
    pub n_valid_pages: usize,
    pub validation_page_ids: Vec<String>,
    pub n_components: usize,
    pub mean_error: f64,
    pub geometric_mean_error: f64,
    /// Mean validation error of the least-squares baseline, when
    /// requested.
    pub linear_mean_error: Option<f64>,
}

/// Page-level k-fold cross-validation: the scaler, PCA, and model are
/// fitted on training folds only; every page lands in validation exactly
/// once. `pages` pairs each page id with its raw feature vector, which
/// must share the manifest the complexity weights refer to.
pub fn cross_validate(
    pages: &[(String, Vec<f64>)],
    manifest: &crate::dom::FeatureManifest,
    platform: &PlatformSpec,
    cfg: &ModelConfig,
    opts: &CvOptions,
) -> Result<Vec<FoldReport>> {
    if opts.folds < 2 {
        return Err(Error::invalid("folds", "at least 2 folds required"));
    }
    if opts.folds > pages.len() {
        return Err(Error::invalid(
            "folds",
            format!("{} folds but only {} pages", opts.folds, pages.len()),
        ));
    }

    // contiguous chunks, remainder spread over the leading folds
    let n = pages.len();
    let base = n / opts.folds;
    let extra = n % opts.folds;
    let mut bounds = vec![0usize];
    for f in 0..opts.folds {
        let size = base + usize::from(f < extra);
        bounds.push(bounds[f] + size);
    }

    let weights = platform.complexity_weights();
    let mut reports = Vec::with_capacity(opts.folds);
    for fold in 0..opts.folds {
        let (lo, hi) = (bounds[fold], bounds[fold + 1]);
        let valid = &pages[lo..hi];
        let train_pages: Vec<&(String, Vec<f64>)> = pages[..lo].iter().chain(&pages[hi..]).collect();

        let train_raw: Vec<Vec<f64>> = train_pages.iter().map(|(_, r)| r.clone()).collect();
        let transform =
            FeatureTransform::fit(&train_raw, &manifest.version, opts.variance_target, opts.k_max)?;

        let project = |id: &str, raw: &Vec<f64>| -> Result<(PageWorkload, Vec<f64>)> {
            let rawv = crate::dom::RawFeatureVector {
                values: raw.clone(),
                manifest_version: manifest.version.clone(),
            };
            let workload = PageWorkload::from_features(id, &rawv, manifest, &weights)?;
            let pcs = transform.project(raw)?;
            Ok((workload, pcs))
        };

        let train_proj: Vec<(PageWorkload, Vec<f64>)> = train_pages
            .iter()
            .map(|(id, raw)| project(id, raw))
            .collect::<Result<_>>()?;
        let valid_proj: Vec<(PageWorkload, Vec<f64>)> = valid
            .iter()
            .map(|(id, raw)| project(id, raw))
            .collect::<Result<_>>()?;

        let train_samples =
            generate_training_grid(&train_proj, &opts.rates, platform, opts.gesture, opts.seed);
        let valid_samples =
            generate_training_grid(&valid_proj, &opts.rates, platform, opts.gesture, opts.seed ^ 0x5eed);

        let fold_cfg = ModelConfig {
            seed: cfg.seed.wrapping_add(fold as u64),
            ..cfg.clone()
        };
        let model = train(&train_samples, &fold_cfg, &transform.manifest_version)?;
        let err = evaluate_error(&model, &valid_samples)?;
        let linear_mean_error = if opts.with_linear {
            let lm = crate::model::fit_linear_baseline(&train_samples)?;
            Some(lm.evaluate_error(&valid_samples)?.mean)
        } else {
            None
        };

        reports.push(FoldReport {
            fold,
            n_train_pages: train_pages.len(),
            n_valid_pages: valid.len(),
            validation_page_ids: valid.iter().map(|(id, _)| id.clone()).collect(),
            n_components: transform.n_components(),
            mean_error: err.mean,
            geometric_mean_error: err.geometric_mean,
            linear_mean_error,
        });
    }
    Ok(reports)
}
