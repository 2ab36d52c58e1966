//! PCA via eigendecomposition of the covariance matrix. Deterministic:
//! component signs are fixed by making each component's
//! largest-magnitude entry positive.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PcaTransform {
    pub mean: Vec<f64>,
    /// k rows of length d, orthonormal.
    pub components: Vec<Vec<f64>>,
    pub explained_variance_ratio: Vec<f64>,
    pub k: usize,
    /// True when k was limited by k_max before reaching the variance
    /// target.
    pub capped: bool,
}

/// Fits PCA on (already scaled) rows, keeping the smallest k whose
/// cumulative explained-variance ratio reaches `variance_target`, capped
/// at min(k_max, rank). A zero-variance dataset yields k = 0.
pub fn fit_pca(rows: &[Vec<f64>], variance_target: f64, k_max: usize) -> Result<PcaTransform> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::EmptyInput("fit_pca needs at least two rows"));
    }
    let d = rows[0].len();
    for row in rows {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
    }

    let mut mean = vec![0.0; d];
    for row in rows {
        for j in 0..d {
            mean[j] += row[j];
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    // zero-variance columns contribute nothing and their all-zero
    // covariance rows give the eigensolver a massively degenerate zero
    // eigenvalue; decompose the active submatrix and re-embed instead
    let active: Vec<usize> = (0..d)
        .filter(|&j| rows.iter().any(|r| r[j] != mean[j]))
        .collect();
    let da = active.len();
    if da == 0 {
        return Ok(PcaTransform {
            mean,
            components: Vec::new(),
            explained_variance_ratio: Vec::new(),
            k: 0,
            capped: false,
        });
    }

    let mut cov = DMatrix::<f64>::zeros(da, da);
    for row in rows {
        let c = DVector::from_iterator(da, active.iter().map(|&j| row[j] - mean[j]));
        cov.syger(1.0 / (n as f64 - 1.0), &c, &c, 1.0);
    }
    // syger fills the lower triangle; mirror it
    for i in 0..da {
        for j in i + 1..da {
            cov[(i, j)] = cov[(j, i)];
        }
    }

    let eig = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..da).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let total: f64 = eig.eigenvalues.iter().map(|&l| l.max(0.0)).sum();
    if total <= 0.0 {
        return Ok(PcaTransform {
            mean,
            components: Vec::new(),
            explained_variance_ratio: Vec::new(),
            k: 0,
            capped: false,
        });
    }

    let rank_tol = 1e-12 * eig.eigenvalues[order[0]].max(1.0);
    let rank = order
        .iter()
        .filter(|&&i| eig.eigenvalues[i] > rank_tol)
        .count();
    let cap = k_max.min(rank);

    let mut components = Vec::new();
    let mut ratios = Vec::new();
    let mut cumulative = 0.0;
    let mut capped = false;
    for &idx in order.iter().take(cap) {
        let ratio = eig.eigenvalues[idx].max(0.0) / total;
        let col = eig.eigenvectors.column(idx);
        let mut comp = vec![0.0; d];
        for (a, &j) in active.iter().enumerate() {
            comp[j] = col[a];
        }
        // deterministic sign: largest-magnitude entry positive
        let dominant = comp
            .iter()
            .cloned()
            .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if dominant < 0.0 {
            for c in &mut comp {
                *c = -*c;
            }
        }
        components.push(comp);
        ratios.push(ratio);
        cumulative += ratio;
        if cumulative >= variance_target {
            break;
        }
    }
    if cumulative < variance_target && components.len() == cap {
        capped = cap == k_max && k_max < rank;
    }

    let k = components.len();
    Ok(PcaTransform {
        mean,
        components,
        explained_variance_ratio: ratios,
        k,
        capped,
    })
}

/// components . (x - mean)
pub fn apply_pca(x: &[f64], t: &PcaTransform) -> Result<Vec<f64>> {
    if x.len() != t.mean.len() {
        return Err(Error::DimensionMismatch {
            expected: t.mean.len(),
            got: x.len(),
        });
    }
    Ok(t.components
        .iter()
        .map(|comp| {
            comp.iter()
                .zip(x.iter().zip(&t.mean))
                .map(|(&c, (&xi, &mi))| c * (xi - mi))
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn rank_one_data_needs_one_component() {
        // points exactly on a line in 2-D
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let t = fit_pca(&rows, 0.95, 10).unwrap();
        assert_eq!(t.k, 1);
        assert_abs_diff_eq!(t.explained_variance_ratio[0], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn isotropic_data_needs_both_components() {
        let mut rng = crate::rng::substream(11, "pca-test");
        let rows: Vec<Vec<f64>> = (0..2000)
            .map(|_| {
                vec![
                    rng.gen_range(-1.0..1.0f64),
                    rng.gen_range(-1.0..1.0f64),
                ]
            })
            .collect();
        let t = fit_pca(&rows, 0.95, 10).unwrap();
        assert_eq!(t.k, 2);
        assert!(t.explained_variance_ratio[0] < 0.6);
    }

    #[test]
    fn full_rank_reconstruction() {
        let mut rng = crate::rng::substream(12, "pca-test");
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        let t = fit_pca(&rows, 1.0, 4).unwrap();
        assert_eq!(t.k, 4);
        for row in &rows {
            let pcs = apply_pca(row, &t).unwrap();
            // reconstruct centered row from components
            for j in 0..4 {
                let recon: f64 = (0..4).map(|c| t.components[c][j] * pcs[c]).sum();
                assert_abs_diff_eq!(recon, row[j] - t.mean[j], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn components_orthonormal_ratios_non_increasing() {
        let mut rng = crate::rng::substream(13, "pca-test");
        let rows: Vec<Vec<f64>> = (0..80)
            .map(|_| {
                let a: f64 = rng.gen_range(-2.0..2.0);
                let b: f64 = rng.gen_range(-1.0..1.0);
                vec![a, b, a + 0.1 * b, 0.5 * a - b, rng.gen_range(-0.1..0.1)]
            })
            .collect();
        let t = fit_pca(&rows, 1.0, 5).unwrap();
        for i in 0..t.k {
            for j in 0..t.k {
                let dot: f64 = t.components[i]
                    .iter()
                    .zip(&t.components[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, expect, epsilon = 1e-8);
            }
        }
        for w in t.explained_variance_ratio.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
        let sum: f64 = t.explained_variance_ratio.iter().sum();
        assert!(sum <= 1.0 + 1e-9);
    }

    #[test]
    fn zero_variance_dataset_yields_k0() {
        let rows = vec![vec![1.0, 2.0]; 5];
        let t = fit_pca(&rows, 0.95, 10).unwrap();
        assert_eq!(t.k, 0);
    }

    #[test]
    fn mean_maps_to_zero_and_component_rows_to_unit_axes() {
        let mut rng = crate::rng::substream(14, "pca-test");
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let t = fit_pca(&rows, 1.0, 3).unwrap();
        let zero = apply_pca(&t.mean, &t).unwrap();
        for z in zero {
            assert_abs_diff_eq!(z, 0.0, epsilon = 1e-10);
        }
        let shifted: Vec<f64> = t.mean.iter().zip(&t.components[0]).map(|(m, c)| m + c).collect();
        let e0 = apply_pca(&shifted, &t).unwrap();
        assert_abs_diff_eq!(e0[0], 1.0, epsilon = 1e-9);
        for z in &e0[1..] {
            assert_abs_diff_eq!(*z, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn projection_matches_naive_multiply() {
        let mut rng = crate::rng::substream(15, "pca-test");
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let t = fit_pca(&rows, 0.99, 6).unwrap();
        let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let got = apply_pca(&x, &t).unwrap();
        for (c, comp) in t.components.iter().enumerate() {
            let mut acc = 0.0;
            for j in 0..6 {
                acc += comp[j] * (x[j] - t.mean[j]);
            }
            assert_abs_diff_eq!(got[c], acc, epsilon = 1e-12);
        }
    }
}
