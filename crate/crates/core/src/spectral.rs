//! Dense symmetric eigensolver and the spectral diagnostics built on it.
//!
//! The solver is Householder reduction to tridiagonal form followed by the
//! implicit QL iteration with Wilkinson-style shifts (the EISPACK
//! `tred2`/`tql2` pair). It is deterministic and needs no workspace beyond
//! two `n`-vectors and, when eigenvectors are requested, an `n x n` array.

use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::distance_matrix::{classify, row_sup_norm, Classification};
use crate::error::{Error, Result};

/// Relative threshold below which an eigenvalue counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-8;

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_QL_ITERATIONS: usize = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `j` pairs with `values[j]`.
    pub vectors: Option<DenseMatrix>,
    /// `max_j |A v_j - l_j v_j| / max(1, |A|_F)`; only known with vectors.
    pub residual: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InertiaCounts {
    pub n_plus: usize,
    pub n_zero: usize,
    pub n_minus: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inertia {
    pub n_plus: usize,
    pub n_zero: usize,
    pub n_minus: usize,
    /// Absolute threshold that separated zero from nonzero.
    pub tolerance: f64,
}

impl Inertia {
    pub fn total(&self) -> usize {
        self.n_plus + self.n_zero + self.n_minus
    }

    pub fn counts(&self) -> InertiaCounts {
        InertiaCounts {
            n_plus: self.n_plus,
            n_zero: self.n_zero,
            n_minus: self.n_minus,
        }
    }
}

pub fn eigensystem(a: &DenseMatrix, want_vectors: bool) -> Result<EigenSystem> {
    let n = a.size();
    if n == 0 {
        return Err(Error::Argument("eigensystem of an empty matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let (d, v) = if n == 2 {
        closed_form_2x2(a)
    } else {
        let mut v = a.as_slice().to_vec();
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        tridiagonalize(n, &mut v, &mut d, &mut e, want_vectors);
        tridiagonal_ql(n, &mut d, &mut e, want_vectors.then_some(&mut v[..]))?;
        (d, v)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    if !want_vectors {
        return Ok(EigenSystem {
            values,
            vectors: None,
            residual: None,
        });
    }
    let vectors = DenseMatrix::from_fn(n, |r, c| v[r * n + order[c]]);
    let residual = residual(a, &values, &vectors);
    Ok(EigenSystem {
        values,
        vectors: Some(vectors),
        residual: Some(residual),
    })
}

/// `[[p, q], [q, r]]` by a single rotation; a hollow matrix gets exactly `±|q|`.
fn closed_form_2x2(a: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let (p, q, r) = (a[(0, 0)], a[(0, 1)], a[(1, 1)]);
    let mid = 0.5 * (p + r);
    let rho = (0.5 * (p - r)).hypot(q);
    let theta = 0.5 * q.atan2(0.5 * (p - r));
    let (sin, cos) = theta.sin_cos();
    // columns: eigenvector of mid - rho, then of mid + rho
    (vec![mid - rho, mid + rho], vec![-sin, cos, cos, sin])
}

/// Ascending eigenvalues only.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    eigensystem(a, false).map(|s| s.values)
}

fn residual(a: &DenseMatrix, values: &[f64], vectors: &DenseMatrix) -> f64 {
    let n = a.size();
    let scale = a.frobenius_norm().max(1.0);
    (0..n)
        .map(|j| {
            let x = vectors.column(j);
            let ax = a.mul_vec(&x);
            ax.iter()
                .zip(&x)
                .map(|(p, q)| (p - values[j] * q).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
        / scale
}

/// Householder reduction of the symmetric array `v` (row-major, `n x n`) to
/// tridiagonal form: diagonal in `d`, subdiagonal in `e[1..]`. With
/// `accumulate`, `v` is overwritten by the orthogonal transformation.
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], accumulate: bool) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for i in 0..n {
            d[i] = v[at(i, i)];
        }
        e[0] = 0.0;
        return;
    }
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)`; rotates the columns of `v` when
/// present.
fn tridiagonal_ql(n: usize, d: &mut [f64], e: &mut [f64], mut v: Option<&mut [f64]>) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::Solver(format!(
                        "QL iteration did not converge for eigenvalue {l} after {MAX_QL_ITERATIONS} sweeps"
                    )));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..n {
                            let row = k * n;
                            h = v[row + i + 1];
                            v[row + i + 1] = s * v[row + i] + c * h;
                            v[row + i] = c * v[row + i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("eigenvalue iteration produced non-finite values".into()));
    }
    Ok(())
}

/// `max(|l_min|, |l_max|)` of an ascending list.
pub fn spectral_scale(sorted: &[f64]) -> f64 {
    match (sorted.first(), sorted.last()) {
        (Some(a), Some(b)) => a.abs().max(b.abs()),
        _ => 0.0,
    }
}

/// Counts eigenvalues above, within and below `tau = 1e-8 * scale`.
pub fn inertia(values: &[f64], scale: f64) -> Inertia {
    inertia_with_tolerance(values, ZERO_THRESHOLD * scale)
}

/// Inertia at an explicit absolute threshold.
pub fn inertia_with_tolerance(values: &[f64], tolerance: f64) -> Inertia {
    let n_plus = values.iter().filter(|v| **v > tolerance).count();
    let n_minus = values.iter().filter(|v| **v < -tolerance).count();
    Inertia {
        n_plus,
        n_zero: values.len() - n_plus - n_minus,
        n_minus,
        tolerance,
    }
}

/// Inertia at the default threshold relative to the list's own scale.
pub fn inertia_auto(sorted: &[f64]) -> Inertia {
    inertia(sorted, spectral_scale(sorted))
}

/// `sum(l) / max(1, sum|l|)`: zero for the spectrum of any hollow matrix.
pub fn trace_defect(values: &[f64]) -> f64 {
    let sum: f64 = values.iter().sum();
    let abs: f64 = values.iter().map(|v| v.abs()).sum();
    sum / abs.max(1.0)
}

/// Largest absolute row sum; every eigenvalue of a hollow matrix lies in
/// `[-bound, bound]` since all Gershgorin discs are centered at 0.
pub fn gershgorin_bound(a: &DenseMatrix) -> f64 {
    row_sup_norm(a).norm
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerronPair {
    pub value: f64,
    /// Unit norm, oriented with a positive entry sum.
    pub vector: Vec<f64>,
    /// Distance from the Perron value to the next eigenvalue below.
    pub spectral_gap: f64,
    /// No other eigenvalue within `1e-8 * scale` of the Perron value.
    pub simple: bool,
}

impl PerronPair {
    pub fn is_positive(&self) -> bool {
        self.vector.iter().all(|x| *x > 0.0)
    }
}

/// Largest eigenvalue and its eigenvector of an HSN+ matrix.
pub fn perron(a: &DenseMatrix) -> Result<PerronPair> {
    if a.size() < 2 {
        return Err(Error::Precondition("Perron pair needs a matrix of size at least 2".into()));
    }
    if classify(a) != Classification::HsnPlus {
        return Err(Error::Precondition("Perron pair needs an HSN+ matrix".into()));
    }
    let sys = eigensystem(a, true)?;
    let n = a.size();
    let value = sys.values[n - 1];
    let spectral_gap = value - sys.values[n - 2];
    let scale = spectral_scale(&sys.values);
    let vectors = sys.vectors.expect("requested vectors");
    let mut vector = vectors.column(n - 1);
    if vector.iter().sum::<f64>() < 0.0 {
        vector.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(PerronPair {
        value,
        vector,
        spectral_gap,
        simple: spectral_gap > ZERO_THRESHOLD * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol * y.abs().max(1.0), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn two_by_two() {
        let a = 2.5;
        let m = DenseMatrix::from_rows(&[[0.0, a], [a, 0.0]]).unwrap();
        let s = eigensystem(&m, true).unwrap();
        assert_close(&s.values, &[-a, a], 1e-15);
        assert!(s.residual.unwrap() < 1e-14);
        let inert = inertia_auto(&s.values);
        assert_eq!((inert.n_plus, inert.n_zero, inert.n_minus), (1, 0, 1));
        let tiny = DenseMatrix::from_rows(&[[0.0, 0.3204093743973933], [0.3204093743973933, 0.0]]).unwrap();
        assert_eq!(eigenvalues(&tiny).unwrap(), vec![-0.3204093743973933, 0.3204093743973933]);
    }

    #[test]
    fn general_two_by_two() {
        for rows in [[[2.0, 1.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, -3.0]], [[0.0, -2.0], [-2.0, 5.0]]] {
            let m = DenseMatrix::from_rows(&rows).unwrap();
            let s = eigensystem(&m, true).unwrap();
            assert!(s.residual.unwrap() < 1e-14, "{rows:?}");
            assert!(s.values[0] <= s.values[1]);
            assert!((s.values[0] + s.values[1] - m.trace()).abs() < 1e-14);
        }
    }

    #[test]
    fn equilateral() {
        let a = 1.7;
        let m = DenseMatrix::from_fn(3, |i, j| if i == j { 0.0 } else { a });
        let s = eigenvalues(&m).unwrap();
        assert_close(&s, &[-a, -a, 2.0 * a], 1e-14);
        let p = perron(&m).unwrap();
        assert!((p.value - 2.0 * a).abs() < 1e-14);
        let r = 1.0 / 3f64.sqrt();
        assert_close(&p.vector, &[r, r, r], 1e-14);
        assert!(p.simple && p.is_positive());
    }

    #[test]
    fn collinear_three() {
        let m = DenseMatrix::from_rows(&[[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]]).unwrap();
        let r6 = 6f64.sqrt();
        let s = eigensystem(&m, true).unwrap();
        assert_close(&s.values, &[-4.0, 2.0 - r6, 2.0 + r6], 1e-13);
        assert!(trace_defect(&s.values).abs() < 1e-15);
        assert_eq!(gershgorin_bound(&m), 5.0);
        assert!((perron(&m).unwrap().value - (2.0 + r6)).abs() < 1e-13);
    }

    #[test]
    fn zero_and_one_by_one() {
        let s = eigensystem(&DenseMatrix::zeros(4), true).unwrap();
        assert_eq!(s.values, vec![0.0; 4]);
        let i = inertia_auto(&s.values);
        assert_eq!(i.n_zero, 4);
        assert_eq!(eigenvalues(&DenseMatrix::zeros(1)).unwrap(), vec![0.0]);
        assert_eq!(gershgorin_bound(&DenseMatrix::zeros(3)), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let m = DenseMatrix::from_rows(&[[0.0, f64::NAN], [f64::NAN, 0.0]]).unwrap();
        assert!(matches!(eigensystem(&m, false), Err(Error::Numeric(_))));
        assert!(matches!(perron(&DenseMatrix::zeros(3)), Err(Error::Precondition(_))));
        assert!(matches!(perron(&DenseMatrix::zeros(1)), Err(Error::Precondition(_))));
    }

    #[test]
    fn values_only_matches_full() {
        let m = DenseMatrix::from_fn(9, |i, j| ((i as f64 - j as f64) * 0.37).powi(2) + (i * j) as f64 * 0.01);
        let m = m.combine(0.5, &DenseMatrix::from_fn(9, |i, j| m[(j, i)]), 0.5).unwrap();
        let a = eigensystem(&m, true).unwrap();
        let b = eigensystem(&m, false).unwrap();
        assert_close(&a.values, &b.values, 1e-12);
        assert!(a.residual.unwrap() < 1e-13);
        let v = a.vectors.unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let dot: f64 = (0..9).map(|k| v[(k, i)] * v[(k, j)]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inertia_threshold() {
        let i = inertia(&[-1.0, -1e-9, 0.0, 5e-9, 2.0], 1.0);
        assert_eq!((i.n_plus, i.n_zero, i.n_minus), (1, 3, 1));
        assert_eq!(i.tolerance, 1e-8);
        assert_eq!(i.total(), 5);
    }
}
