//! Min-max scaling to [0,1] with clipping for out-of-range deployment
//! inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScalerParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// Records the per-column min and max over the training rows.
pub fn fit_scaler(rows: &[Vec<f64>]) -> Result<ScalerParams> {
    let Some(first) = rows.first() else {
        return Err(Error::EmptyInput("fit_scaler needs at least one row"));
    };
    let d = first.len();
    let mut min = first.clone();
    let mut max = first.clone();
    for row in &rows[1..] {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
        for j in 0..d {
            min[j] = min[j].min(row[j]);
            max[j] = max[j].max(row[j]);
        }
    }
    Ok(ScalerParams { min, max })
}

/// (x - min) / (max - min) per column, clipping x into [min, max] first.
/// Constant columns map to 0.
pub fn apply_scaler(x: &[f64], p: &ScalerParams) -> Result<Vec<f64>> {
    if x.len() != p.min.len() {
        return Err(Error::DimensionMismatch {
            expected: p.min.len(),
            got: x.len(),
        });
    }
    Ok(x.iter()
        .zip(p.min.iter().zip(&p.max))
        .map(|(&v, (&lo, &hi))| {
            if hi <= lo {
                0.0
            } else {
                (v.clamp(lo, hi) - lo) / (hi - lo)
            }
        })
        .collect())
}
