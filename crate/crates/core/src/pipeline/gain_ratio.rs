//! Information-gain-ratio feature importance against binned FPS targets.

use crate::error::{Error, Result};

/// Scores each feature column of X against the targets y. Both y and
/// each feature are discretized into `bins` equal-frequency bins; the
/// score is information gain divided by the feature's split entropy.
/// Constant features score 0.
pub fn gain_ratio_importance(rows: &[Vec<f64>], y: &[f64], bins: usize) -> Result<Vec<f64>> {
    let n = rows.len();
    if n == 0 || rows[0].is_empty() {
        return Err(Error::EmptyInput("gain_ratio_importance needs data"));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if n < bins {
        return Err(Error::invalid(
            "bins",
            format!("{bins} bins but only {n} samples"),
        ));
    }
    let d = rows[0].len();
    let y_bins = equal_frequency_bins(y, bins);
    let h_y = entropy(&counts(&y_bins, bins));

    let mut scores = Vec::with_capacity(d);
    for j in 0..d {
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        if col.iter().all(|&v| v == col[0]) {
            scores.push(0.0);
            continue;
        }
        let f_bins = equal_frequency_bins(&col, bins);
        let h_split = entropy(&counts(&f_bins, bins));
        if h_split <= 0.0 {
            scores.push(0.0);
            continue;
        }
        // H(Y | F): weighted entropy of y bins within each feature bin
        let mut joint = vec![vec![0usize; bins]; bins];
        for i in 0..n {
            joint[f_bins[i]][y_bins[i]] += 1;
        }
        let mut h_cond = 0.0;
        for row in &joint {
            let total: usize = row.iter().sum();
            if total > 0 {
                h_cond += (total as f64 / n as f64) * entropy(row);
            }
        }
        let gain = (h_y - h_cond).max(0.0);
        scores.push((gain / h_split).min(1.0));
    }
    Ok(scores)
}

/// Rank-based equal-frequency binning: sample at sorted position r goes
/// to bin floor(r * bins / n). Invariant under strictly monotone
/// transforms of the values.
fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut out = vec![0usize; n];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = (rank * bins / n).min(bins - 1);
    }
    out
}

fn counts(bins_assigned: &[usize], bins: usize) -> Vec<usize> {
    let mut c = vec![0usize; bins];
    for &b in bins_assigned {
        c[b] += 1;
    }
    c
}

fn entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}
