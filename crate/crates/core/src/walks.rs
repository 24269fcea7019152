//! Walks: point clouds that move with a time parameter `t` in `[t0, t1]`.
//!
//! Every evaluation is checked against the degeneracy policy: a snapshot
//! whose closest pair is nearer than `1e-10` times its diameter is rejected,
//! since its squared-distance matrix would leave the positive cone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::sampling::PointCloud;

pub const DEGENERACY_RATIO: f64 = 1e-10;

/// Times checked when a walk is constructed.
const VALIDATION_SAMPLES: usize = 33;

/// Grid on which a scale function must stay positive.
const SCALE_CHECK_SAMPLES: usize = 257;

/// Scalar functions of time from a small serializable grammar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFn {
    Constant { value: f64 },
    /// `intercept + slope * t`
    Affine { intercept: f64, slope: f64 },
    /// `scale * exp(rate * t)`
    Exponential { scale: f64, rate: f64 },
    /// `offset + amplitude * sin(frequency * t + phase)`
    Sinusoidal {
        offset: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl ScalarFn {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ScalarFn::Constant { value } => value,
            ScalarFn::Affine { intercept, slope } => intercept + slope * t,
            ScalarFn::Exponential { scale, rate } => scale * (rate * t).exp(),
            ScalarFn::Sinusoidal {
                offset,
                amplitude,
                frequency,
                phase,
            } => offset + amplitude * (frequency * t + phase).sin(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Path {
    /// Pointwise convex interpolation from `start` (at `start_time`) to `end`.
    Linear {
        start: PointCloud,
        end: PointCloud,
        start_time: f64,
        end_time: f64,
    },
    /// Every length of `base` stretched by `scale(t)`.
    Scaling { base: PointCloud, scale: ScalarFn },
    /// `base_k + displacement_k * sin(frequency_k * t + phase_k)`.
    Harmonic {
        base: PointCloud,
        displacements: Vec<Vec<f64>>,
        frequencies: Vec<f64>,
        phases: Vec<f64>,
    },
    /// `(1 - u) U(t) + u V(t)` in ambient coordinates.
    HomotopySlice { u: f64, first: Box<Walk>, second: Box<Walk> },
    /// `inner` traversed backwards.
    Reversed { inner: Box<Walk> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Walk {
    space: MetricSpace,
    t0: f64,
    t1: f64,
    path: Path,
}

impl Walk {
    fn checked(space: MetricSpace, t0: f64, t1: f64, path: Path) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
            return Err(Error::Argument(format!("walk interval must satisfy t0 < t1, got [{t0}, {t1}]")));
        }
        let walk = Walk { space, t0, t1, path };
        for k in 0..VALIDATION_SAMPLES {
            walk.evaluate(walk.grid_time(k, VALIDATION_SAMPLES - 1))?;
        }
        Ok(walk)
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Number of points in every snapshot.
    pub fn len(&self) -> usize {
        match &self.path {
            Path::Linear { start, .. } => start.len(),
            Path::Scaling { base, .. } | Path::Harmonic { base, .. } => base.len(),
            Path::HomotopySlice { first, .. } => first.len(),
            Path::Reversed { inner } => inner.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `t0 + (t1 - t0) * k / steps`, hitting both endpoints exactly.
    pub fn grid_time(&self, k: usize, steps: usize) -> f64 {
        if k == 0 {
            self.t0
        } else if k == steps {
            self.t1
        } else {
            self.t0 + (self.t1 - self.t0) * (k as f64 / steps as f64)
        }
    }

    pub fn evaluate(&self, t: f64) -> Result<PointCloud> {
        if !(self.t0 <= t && t <= self.t1) {
            return Err(Error::Range(format!("t = {t} outside [{}, {}]", self.t0, self.t1)));
        }
        let cloud = match &self.path {
            Path::Linear {
                start,
                end,
                start_time,
                end_time,
            } => {
                let lambda = (t - start_time) / (end_time - start_time);
                if lambda == 0.0 {
                    start.clone()
                } else if lambda == 1.0 {
                    end.clone()
                } else {
                    let points = blend(start.points(), end.points(), lambda);
                    PointCloud::new(start.space().clone(), start.offset(), points)?
                }
            }
            Path::Scaling { base, scale } => {
                let s = scale.eval(t);
                if !(s > 0.0 && s.is_finite()) {
                    return Err(Error::Argument(format!("scale function is {s} at t = {t}")));
                }
                let points = base
                    .points()
                    .iter()
                    .map(|p| p.iter().map(|x| x * s).collect())
                    .collect();
                PointCloud::new(base.space().stretched(s), base.offset(), points)?
            }
            Path::Harmonic {
                base,
                displacements,
                frequencies,
                phases,
            } => {
                let points = base
                    .points()
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        let w = (frequencies[k] * t + phases[k]).sin();
                        p.iter().zip(&displacements[k]).map(|(x, a)| x + a * w).collect()
                    })
                    .collect();
                PointCloud::new(base.space().clone(), base.offset(), points)?
            }
            Path::HomotopySlice { u, first, second } => {
                if *u == 0.0 {
                    first.evaluate(t)?
                } else if *u == 1.0 {
                    second.evaluate(t)?
                } else {
                    let a = first.evaluate(t)?;
                    let b = second.evaluate(t)?;
                    if a.space() != b.space() {
                        return Err(Error::Argument(format!(
                            "homotopy ends live in different spaces at t = {t}"
                        )));
                    }
                    PointCloud::new(a.space().clone(), a.offset(), blend(a.points(), b.points(), *u))?
                }
            }
            Path::Reversed { inner } => {
                let s = (inner.t0 + inner.t1 - t).clamp(inner.t0, inner.t1);
                inner.evaluate(s)?
            }
        };
        check_nondegenerate(&cloud, t)?;
        Ok(cloud)
    }

    /// The same walk traversed from `t1` back to `t0`, over the same interval.
    pub fn reversed(&self) -> Walk {
        Walk {
            space: self.space.clone(),
            t0: self.t0,
            t1: self.t1,
            path: Path::Reversed {
                inner: Box::new(self.clone()),
            },
        }
    }

    /// The walk restricted to `[a, b]` inside its interval.
    pub fn restricted(&self, a: f64, b: f64) -> Result<Walk> {
        if !(self.t0 <= a && a < b && b <= self.t1) {
            return Err(Error::Range(format!(
                "[{a}, {b}] is not a subinterval of [{}, {}]",
                self.t0, self.t1
            )));
        }
        Ok(Walk {
            t0: a,
            t1: b,
            ..self.clone()
        })
    }
}

fn blend(a: &[Vec<f64>], b: &[Vec<f64>], lambda: f64) -> Vec<Vec<f64>> {
    a.iter()
        .zip(b)
        .map(|(p, q)| p.iter().zip(q).map(|(x, y)| (1.0 - lambda) * x + lambda * y).collect())
        .collect()
}

fn check_nondegenerate(cloud: &PointCloud, t: f64) -> Result<()> {
    if cloud.len() < 2 {
        return Ok(());
    }
    let (_, _, closest) = cloud.closest_pair()?.expect("at least two points");
    let diameter = cloud.diameter()?;
    if closest < DEGENERACY_RATIO * diameter {
        return Err(Error::Degenerate(format!(
            "closest pair {closest:e} below {DEGENERACY_RATIO:e} x diameter {diameter:e} at t = {t}"
        )));
    }
    Ok(())
}

fn same_shape(a: &PointCloud, b: &PointCloud) -> Result<()> {
    if a.space() != b.space() {
        return Err(Error::Argument("clouds live in different spaces".into()));
    }
    if a.len() != b.len() {
        return Err(Error::Argument(format!("clouds have {} and {} points", a.len(), b.len())));
    }
    Ok(())
}

/// Straight-line motion from `start` at `t0` to `end` at `t1`.
pub fn linear_walk(start: PointCloud, end: PointCloud, t0: f64, t1: f64) -> Result<Walk> {
    same_shape(&start, &end)?;
    let space = start.space().clone();
    Walk::checked(
        space,
        t0,
        t1,
        Path::Linear {
            start,
            end,
            start_time: t0,
            end_time: t1,
        },
    )
}

/// A walk that never moves.
pub fn constant_walk(cloud: PointCloud, t0: f64, t1: f64) -> Result<Walk> {
    linear_walk(cloud.clone(), cloud, t0, t1)
}

/// Stretches every length of `base` by `scale(t)`; `scale` must stay
/// positive on `[t0, t1]`.
pub fn scaling_walk(base: PointCloud, scale: ScalarFn, t0: f64, t1: f64) -> Result<Walk> {
    if !(t0 < t1) {
        return Err(Error::Argument(format!("walk interval must satisfy t0 < t1, got [{t0}, {t1}]")));
    }
    for k in 0..SCALE_CHECK_SAMPLES {
        let t = t0 + (t1 - t0) * (k as f64 / (SCALE_CHECK_SAMPLES - 1) as f64);
        let s = scale.eval(t);
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Argument(format!("scale function is {s} at t = {t}")));
        }
    }
    let space = base.space().clone();
    Walk::checked(space, t0, t1, Path::Scaling { base, scale })
}

/// Each point oscillates along its own displacement vector.
pub fn harmonic_walk(
    base: PointCloud,
    displacements: Vec<Vec<f64>>,
    frequencies: Vec<f64>,
    phases: Vec<f64>,
    t0: f64,
    t1: f64,
) -> Result<Walk> {
    let n = base.len();
    if displacements.len() != n || frequencies.len() != n || phases.len() != n {
        return Err(Error::Argument(format!(
            "harmonic walk needs one displacement, frequency and phase per point ({n})"
        )));
    }
    let arity = base.space().coord_len();
    if let Some(d) = displacements.iter().find(|d| d.len() != arity) {
        return Err(Error::Dimension {
            expected: arity,
            found: d.len(),
        });
    }
    let space = base.space().clone();
    Walk::checked(
        space,
        t0,
        t1,
        Path::Harmonic {
            base,
            displacements,
            frequencies,
            phases,
        },
    )
}

/// The slice `t -> (1 - u) U(t) + u V(t)` of the point-level homotopy
/// between two walks.
pub fn homotopy(first: &Walk, second: &Walk, u: f64) -> Result<Walk> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Argument(format!("homotopy parameter {u} outside [0, 1]")));
    }
    if first.space != second.space {
        return Err(Error::Argument("walks live in different spaces".into()));
    }
    if first.len() != second.len() {
        return Err(Error::Argument(format!(
            "walks move {} and {} points",
            first.len(),
            second.len()
        )));
    }
    if first.t0 != second.t0 || first.t1 != second.t1 {
        return Err(Error::Argument("walks run over different time intervals".into()));
    }
    Walk::checked(
        first.space.clone(),
        first.t0,
        first.t1,
        Path::HomotopySlice {
            u,
            first: Box::new(first.clone()),
            second: Box::new(second.clone()),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance_matrix::SquaredDistanceMatrix;

    fn line(xs: &[f64]) -> PointCloud {
        PointCloud::new(MetricSpace::real_line(), 0, xs.iter().map(|x| vec![*x]).collect()).unwrap()
    }

    #[test]
    fn constant_path() {
        let c = line(&[0.0, 1.0, 3.0]);
        let w = constant_walk(c.clone(), 0.0, 2.0).unwrap();
        for t in [0.0, 0.3, 1.7, 2.0] {
            assert_eq!(w.evaluate(t).unwrap().points(), c.points());
        }
    }

    #[test]
    fn linear_endpoints_exact() {
        let a = line(&[0.0, 1.0]);
        let b = line(&[0.5, 4.0]);
        let w = linear_walk(a.clone(), b.clone(), 0.0, 1.0).unwrap();
        assert_eq!(w.evaluate(0.0).unwrap(), a);
        assert_eq!(w.evaluate(1.0).unwrap(), b);
        assert_eq!(w.evaluate(0.5).unwrap().points(), &[vec![0.25], vec![2.5]]);
        assert!(matches!(w.evaluate(1.5), Err(Error::Range(_))));
        assert!(matches!(w.evaluate(-0.1), Err(Error::Range(_))));
    }

    #[test]
    fn scaling_doubles_coordinates() {
        let w = scaling_walk(
            line(&[0.0, 1.0]),
            ScalarFn::Affine {
                intercept: 1.0,
                slope: 1.0,
            },
            0.0,
            1.0,
        )
        .unwrap();
        assert_eq!(w.evaluate(1.0).unwrap().points(), &[vec![0.0], vec![2.0]]);
        let m = SquaredDistanceMatrix::build(&w.evaluate(1.0).unwrap()).unwrap();
        assert_eq!(m.entries()[(0, 1)], 4.0);
    }

    #[test]
    fn sphere_stretch_changes_radius() {
        let base = PointCloud::new(
            MetricSpace::sphere(1, 1.0).unwrap(),
            0,
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let w = scaling_walk(base, ScalarFn::Constant { value: 3.0 }, 0.0, 1.0).unwrap();
        let c = w.evaluate(0.5).unwrap();
        assert_eq!(c.space(), &MetricSpace::sphere(1, 3.0).unwrap());
        let d = c.space().distance(&c.points()[0], &c.points()[1]).unwrap();
        assert!((d - 1.5 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_scale_rejected() {
        let r = scaling_walk(
            line(&[0.0, 1.0]),
            ScalarFn::Affine {
                intercept: 1.0,
                slope: -2.0,
            },
            0.0,
            1.0,
        );
        assert!(matches!(r, Err(Error::Argument(_))));
    }

    #[test]
    fn collision_is_degenerate() {
        // the two points swap places and meet at t = 0.5
        let r = linear_walk(line(&[0.0, 1.0]), line(&[1.0, 0.0]), 0.0, 1.0);
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    #[test]
    fn homotopy_boundaries() {
        let u = linear_walk(line(&[0.0, 1.0, 2.0]), line(&[0.0, 2.0, 5.0]), 0.0, 1.0).unwrap();
        let v = linear_walk(line(&[1.0, 3.0, 4.0]), line(&[-1.0, 3.0, 6.0]), 0.0, 1.0).unwrap();
        let h0 = homotopy(&u, &v, 0.0).unwrap();
        let h1 = homotopy(&u, &v, 1.0).unwrap();
        let same = homotopy(&u, &u, 0.37).unwrap();
        for t in [0.0, 0.25, 0.9, 1.0] {
            assert_eq!(h0.evaluate(t).unwrap(), u.evaluate(t).unwrap());
            assert_eq!(h1.evaluate(t).unwrap(), v.evaluate(t).unwrap());
            for (p, q) in same.evaluate(t).unwrap().points().iter().zip(u.evaluate(t).unwrap().points()) {
                assert!((p[0] - q[0]).abs() < 1e-15);
            }
        }
        assert!(homotopy(&u, &v, 1.5).is_err());
        let shorter = linear_walk(line(&[0.0, 1.0]), line(&[0.0, 2.0]), 0.0, 1.0).unwrap();
        assert!(homotopy(&u, &shorter, 0.5).is_err());
        let later = linear_walk(line(&[0.0, 1.0, 2.0]), line(&[0.0, 2.0, 5.0]), 0.0, 2.0).unwrap();
        assert!(homotopy(&u, &later, 0.5).is_err());
    }

    #[test]
    fn reverse_and_restrict() {
        let a = line(&[0.0, 1.0]);
        let b = line(&[0.0, 3.0]);
        let w = linear_walk(a.clone(), b.clone(), 0.0, 2.0).unwrap();
        let r = w.reversed();
        assert_eq!(r.evaluate(0.0).unwrap(), b);
        assert_eq!(r.evaluate(2.0).unwrap(), a);
        let half = w.restricted(1.0, 2.0).unwrap();
        assert_eq!(half.evaluate(1.0).unwrap(), w.evaluate(1.0).unwrap());
        assert!(half.evaluate(0.5).is_err());
        assert!(w.restricted(1.0, 3.0).is_err());
    }

    #[test]
    fn harmonic_motion() {
        let base = line(&[0.0, 5.0]);
        let w = harmonic_walk(
            base,
            vec![vec![1.0], vec![0.0]],
            vec![std::f64::consts::PI, 1.0],
            vec![0.0, 0.0],
            0.0,
            1.0,
        )
        .unwrap();
        let c = w.evaluate(0.5).unwrap();
        assert!((c.points()[0][0] - 1.0).abs() < 1e-15);
        assert!(harmonic_walk(line(&[0.0, 1.0]), vec![vec![1.0]], vec![1.0], vec![0.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn scalar_fn_grammar() {
        let f: ScalarFn = toml::from_str("kind = \"sinusoidal\"\noffset = 2.0\namplitude = 1.0\nfrequency = 3.0\n").unwrap();
        assert_eq!(f.eval(0.0), 2.0);
        assert_eq!(ScalarFn::Exponential { scale: 2.0, rate: 0.0 }.eval(5.0), 2.0);
    }
}
