//! Varimax rotation: orthogonal rotation of a loading matrix maximizing
//! the variance of squared loadings per component. Classical pairwise
//! (Jacobi-style) sweeps with Kaiser's closed-form angle, no row
//! normalization.

/// Rotates a d x k loading matrix. k = 1 (or empty input) returns the
/// input unchanged. Per-row communalities are preserved (the rotation is
/// a product of plane rotations).
pub fn varimax_rotate(loadings: &[Vec<f64>], max_iter: usize, tol: f64) -> Vec<Vec<f64>> {
    let d = loadings.len();
    let k = loadings.first().map_or(0, |r| r.len());
    if d == 0 || k <= 1 {
        return loadings.to_vec();
    }

    let mut lam = loadings.to_vec();
    let n = d as f64;
    for _ in 0..max_iter {
        let mut max_angle = 0.0f64;
        for p in 0..k - 1 {
            for q in p + 1..k {
                // Kaiser's optimal angle for the (p, q) plane
                let (mut a, mut b, mut c, mut e) = (0.0, 0.0, 0.0, 0.0);
                for row in &lam {
                    let x = row[p];
                    let y = row[q];
                    let u = x * x - y * y;
                    let v = 2.0 * x * y;
                    a += u;
                    b += v;
                    c += u * u - v * v;
                    e += 2.0 * u * v;
                }
                let num = e - 2.0 * a * b / n;
                let den = c - (a * a - b * b) / n;
                let phi = 0.25 * num.atan2(den);
                if phi.abs() > f64::EPSILON {
                    let (s, co) = phi.sin_cos();
                    for row in &mut lam {
                        let x = row[p];
                        let y = row[q];
                        row[p] = x * co + y * s;
                        row[q] = y * co - x * s;
                    }
                }
                max_angle = max_angle.max(phi.abs());
            }
        }
        if max_angle < tol {
            break;
        }
    }
    lam
}
