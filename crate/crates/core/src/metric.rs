//! Metric spaces supported by the point samplers and matrix builders.
//!
//! Points are plain coordinate slices. Their arity depends on the space:
//! `dim` for Minkowski and torus spaces, `dim + 1` for spheres (extrinsic
//! coordinates in the embedding space) and 1 for the real line.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricSpace {
    /// `R^dim` with `d(x, y) = (sum |x_i - y_i|^p)^(1/p)`, finite `p >= 1`.
    MinkowskiLp { dim: usize, p: f64 },
    /// Round sphere `S^dim` of the given radius with the geodesic distance.
    Sphere { dim: usize, radius: f64 },
    /// Flat torus `R^dim / (periods Z^dim)` with the wrap-around Euclidean distance.
    FlatTorus { periods: Vec<f64> },
    RealLine,
}

impl MetricSpace {
    pub fn minkowski(dim: usize, p: f64) -> Result<Self> {
        let s = MetricSpace::MinkowskiLp { dim, p };
        s.validate()?;
        Ok(s)
    }

    pub fn sphere(dim: usize, radius: f64) -> Result<Self> {
        let s = MetricSpace::Sphere { dim, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn flat_torus(periods: Vec<f64>) -> Result<Self> {
        let s = MetricSpace::FlatTorus { periods };
        s.validate()?;
        Ok(s)
    }

    pub fn real_line() -> Self {
        MetricSpace::RealLine
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MetricSpace::MinkowskiLp { dim, p } => {
                if *dim == 0 {
                    return Err(Error::Argument("dimension must be at least 1".into()));
                }
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(Error::Argument(format!("Minkowski exponent must be a finite p >= 1, got {p}")));
                }
            }
            MetricSpace::Sphere { dim, radius } => {
                if *dim == 0 {
                    return Err(Error::Argument("dimension must be at least 1".into()));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::Argument(format!("sphere radius must be positive, got {radius}")));
                }
            }
            MetricSpace::FlatTorus { periods } => {
                if periods.is_empty() {
                    return Err(Error::Argument("torus needs at least one period".into()));
                }
                if let Some(l) = periods.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
                    return Err(Error::Argument(format!("torus periods must be positive, got {l}")));
                }
            }
            MetricSpace::RealLine => {}
        }
        Ok(())
    }

    /// Manifold dimension.
    pub fn dim(&self) -> usize {
        match self {
            MetricSpace::MinkowskiLp { dim, .. } | MetricSpace::Sphere { dim, .. } => *dim,
            MetricSpace::FlatTorus { periods } => periods.len(),
            MetricSpace::RealLine => 1,
        }
    }

    /// Number of stored coordinates per point.
    pub fn coord_len(&self) -> usize {
        match self {
            MetricSpace::Sphere { dim, .. } => dim + 1,
            _ => self.dim(),
        }
    }

    /// Short human-readable label, e.g. `L1.5(3)` or `S2(r=1)`.
    pub fn label(&self) -> String {
        match self {
            MetricSpace::MinkowskiLp { dim, p } => format!("L{p}({dim})"),
            MetricSpace::Sphere { dim, radius } => format!("S{dim}(r={radius})"),
            MetricSpace::FlatTorus { periods } => format!("T{}({periods:?})", periods.len()),
            MetricSpace::RealLine => "R".to_string(),
        }
    }

    fn check_arity(&self, x: &[f64]) -> Result<()> {
        let expected = self.coord_len();
        if x.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Brings raw coordinates into canonical form: sphere points are
    /// rescaled onto the sphere, torus coordinates are reduced into
    /// `[0, period)`.
    pub fn canonicalize(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_arity(x)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinate in {x:?}")));
        }
        match self {
            MetricSpace::Sphere { radius, .. } => {
                let norm = euclidean_norm(x);
                if norm == 0.0 {
                    return Err(Error::InvalidPoint("sphere point with zero norm".into()));
                }
                // points already on the sphere are kept bit-for-bit
                if (norm - radius).abs() <= 8.0 * f64::EPSILON * radius {
                    return Ok(x.to_vec());
                }
                Ok(x.iter().map(|v| v / norm * radius).collect())
            }
            MetricSpace::FlatTorus { periods } => Ok(x
                .iter()
                .zip(periods)
                .map(|(v, l)| {
                    let r = v.rem_euclid(*l);
                    // rem_euclid may round up to exactly l
                    if r >= *l {
                        0.0
                    } else {
                        r
                    }
                })
                .collect()),
            _ => Ok(x.to_vec()),
        }
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_arity(x)?;
        self.check_arity(y)?;
        match self {
            MetricSpace::MinkowskiLp { p, .. } => Ok(lp_norm(x.iter().zip(y).map(|(a, b)| (a - b).abs()), *p)),
            MetricSpace::RealLine => Ok((x[0] - y[0]).abs()),
            MetricSpace::Sphere { radius, .. } => {
                let nx = euclidean_norm(x);
                let ny = euclidean_norm(y);
                if nx == 0.0 || ny == 0.0 {
                    return Err(Error::InvalidPoint("sphere point with zero norm".into()));
                }
                // 2 atan2(|u - v|, |u + v|) is accurate for both nearby and
                // nearly antipodal directions.
                let diff = euclidean_norm_iter(x.iter().zip(y).map(|(a, b)| a / nx - b / ny));
                let sum = euclidean_norm_iter(x.iter().zip(y).map(|(a, b)| a / nx + b / ny));
                Ok(radius * 2.0 * diff.atan2(sum))
            }
            MetricSpace::FlatTorus { periods } => Ok(lp_norm(
                x.iter().zip(y).zip(periods).map(|((a, b), l)| {
                    let g = (a - b).abs() % l;
                    g.min(l - g)
                }),
                2.0,
            )),
        }
    }

    /// Supremum of pairwise distances; `f64::INFINITY` for unbounded spaces.
    pub fn diameter_bound(&self) -> f64 {
        match self {
            MetricSpace::Sphere { radius, .. } => PI * radius,
            MetricSpace::FlatTorus { periods } => periods.iter().map(|l| (l / 2.0).powi(2)).sum::<f64>().sqrt(),
            MetricSpace::MinkowskiLp { .. } | MetricSpace::RealLine => f64::INFINITY,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.diameter_bound().is_finite()
    }

    /// The space obtained by stretching every length by `factor`.
    pub fn stretched(&self, factor: f64) -> MetricSpace {
        match self {
            MetricSpace::Sphere { dim, radius } => MetricSpace::Sphere {
                dim: *dim,
                radius: radius * factor,
            },
            MetricSpace::FlatTorus { periods } => MetricSpace::FlatTorus {
                periods: periods.iter().map(|l| l * factor).collect(),
            },
            other => other.clone(),
        }
    }
}

fn euclidean_norm(x: &[f64]) -> f64 {
    euclidean_norm_iter(x.iter().copied())
}

fn euclidean_norm_iter(it: impl Iterator<Item = f64>) -> f64 {
    it.map(|v| v * v).sum::<f64>().sqrt()
}

/// `(sum g_i^p)^(1/p)` for nonnegative gaps, rescaled by the largest gap so
/// tiny separations do not underflow.
fn lp_norm(gaps: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    if p == 1.0 {
        return gaps.sum();
    }
    let m = gaps.clone().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    if p == 2.0 {
        return m * gaps.map(|g| (g / m) * (g / m)).sum::<f64>().sqrt();
    }
    m * gaps.map(|g| (g / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minkowski_examples() {
        let l1 = MetricSpace::minkowski(3, 1.0).unwrap();
        assert_eq!(l1.distance(&[0.0; 3], &[1.0; 3]).unwrap(), 3.0);
        let l2 = MetricSpace::minkowski(3, 2.0).unwrap();
        assert_eq!(l2.distance(&[0.0; 3], &[1.0; 3]).unwrap(), 3f64.sqrt());
        assert!((l2.distance(&[0.0; 3], &[1.0; 3]).unwrap() - 1.7320508).abs() < 1e-7);
    }

    #[test]
    fn antipodal_circle_points() {
        let s = MetricSpace::sphere(1, 1.0).unwrap();
        assert_eq!(s.distance(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(), PI);
        assert_eq!(s.distance(&[0.3, 0.4], &[0.3, 0.4]).unwrap(), 0.0);
    }

    #[test]
    fn diameters() {
        assert_eq!(MetricSpace::sphere(2, 2.5).unwrap().diameter_bound(), PI * 2.5);
        assert_eq!(MetricSpace::minkowski(3, 2.0).unwrap().diameter_bound(), f64::INFINITY);
        let l = 3.0;
        let t = MetricSpace::flat_torus(vec![l, l]).unwrap();
        assert!((t.diameter_bound() - 2f64.sqrt() * l / 2.0).abs() < 1e-15);
        // attained at the half-period point
        let d = t.distance(&[0.0, 0.0], &[l / 2.0, l / 2.0]).unwrap();
        assert!((d - t.diameter_bound()).abs() < 1e-15);
    }

    #[test]
    fn torus_wraps() {
        let t = MetricSpace::flat_torus(vec![1.0]).unwrap();
        assert!((t.distance(&[0.05], &[0.95]).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(t.canonicalize(&[-0.25]).unwrap(), vec![0.75]);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(
            MetricSpace::minkowski(3, 2.0).unwrap().distance(&[0.0; 2], &[0.0; 3]),
            Err(Error::Dimension { expected: 3, found: 2 })
        ));
        assert!(matches!(
            MetricSpace::sphere(2, 1.0).unwrap().distance(&[0.0; 3], &[1.0, 0.0, 0.0]),
            Err(Error::InvalidPoint(_))
        ));
        assert!(MetricSpace::minkowski(3, 0.5).is_err());
        assert!(MetricSpace::minkowski(3, f64::INFINITY).is_err());
        assert!(MetricSpace::minkowski(0, 2.0).is_err());
        assert!(MetricSpace::sphere(2, 0.0).is_err());
        assert!(MetricSpace::flat_torus(vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn tiny_gaps_do_not_underflow() {
        let s = MetricSpace::minkowski(2, 3.0).unwrap();
        let d = s.distance(&[0.0, 0.0], &[1e-200, 0.0]).unwrap();
        assert!(d > 0.0);
    }

    #[test]
    fn descriptor_toml_shape() {
        let s: MetricSpace = toml::from_str("kind = \"minkowski_lp\"\ndim = 3\np = 1.5\n").unwrap();
        assert_eq!(s, MetricSpace::MinkowskiLp { dim: 3, p: 1.5 });
        let t: MetricSpace = toml::from_str("kind = \"flat_torus\"\nperiods = [1.0, 2.0]\n").unwrap();
        assert_eq!(t.dim(), 2);
    }
}
