//! Independent reference computations for the integration tests. Nothing
//! here calls the library's solvers.

#![allow(dead_code)]

use distspec::DenseMatrix;

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
/// Returns ascending eigenvalues.
pub fn jacobi_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
    let n = m.size();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let total: f64 = a.iter().flatten().map(|v| v * v).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off <= 1e-30 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    values.sort_by(|x, y| x.total_cmp(y));
    values
}

/// Dominant eigenpair of a nonnegative symmetric matrix by power iteration
/// on `A + s I`, `s` the max row sum, so every shifted eigenvalue is
/// nonnegative and the top one dominates.
pub fn power_iteration(m: &DenseMatrix) -> (f64, Vec<f64>) {
    let n = m.size();
    let shift = (0..n).map(|i| m.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    for _ in 0..200_000 {
        let mut y = m.mul_vec(&x);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += shift * xi;
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut y {
            *v /= norm;
        }
        let ax = m.mul_vec(&y);
        let next: f64 = ax.iter().zip(&y).map(|(a, b)| a * b).sum();
        let delta: f64 = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        let done = (next - lambda).abs() <= 1e-15 * next.abs() && delta < 1e-13;
        lambda = next;
        if done {
            break;
        }
    }
    (lambda, x)
}

/// Real roots of `x^3 + p x + q` when all three are real, ascending.
pub fn depressed_cubic_roots(p: f64, q: f64) -> [f64; 3] {
    assert!(p < 0.0);
    let r = 2.0 * (-p / 3.0).sqrt();
    let phi = ((3.0 * q / (p * r)).clamp(-1.0, 1.0)).acos() / 3.0;
    let mut roots = [0, 1, 2].map(|k| r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos());
    roots.sort_by(|a, b| a.total_cmp(b));
    roots
}

/// Characteristic polynomial of a hollow symmetric 3x3 matrix with
/// off-diagonal entries `a, b, c`: `x^3 - (a^2 + b^2 + c^2) x - 2abc`.
pub fn hollow3_roots(a: f64, b: f64, c: f64) -> [f64; 3] {
    depressed_cubic_roots(-(a * a + b * b + c * c), -2.0 * a * b * c)
}

/// Sign counts with an absolute tolerance.
pub fn count_signs(values: &[f64], tol: f64) -> (usize, usize, usize) {
    let plus = values.iter().filter(|v| **v > tol).count();
    let minus = values.iter().filter(|v| **v < -tol).count();
    (plus, values.len() - plus - minus, minus)
}

/// Squared-distance matrix built directly from the Minkowski formula.
pub fn minkowski_sq(points: &[Vec<f64>], p: f64) -> DenseMatrix {
    DenseMatrix::from_fn(points.len(), |i, j| {
        let s: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).abs().powf(p)).sum();
        s.powf(2.0 / p)
    })
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}
