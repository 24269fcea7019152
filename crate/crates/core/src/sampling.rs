//! Seeded point clouds.
//!
//! All randomness flows through [`Stream`], a ChaCha8 generator keyed by a
//! `(seed, stream)` pair, so independent tasks never share generator state
//! and parallel runs reproduce serial ones. The variate recipes are pinned:
//!
//! * uniform `(0, 1]`: `((u64 >> 11) + 1) * 2^-53`
//! * normal: Box–Muller, cosine branch only
//! * gamma: Marsaglia–Tsang squeeze/rejection, with the `U^(1/a)` boost for
//!   shapes below one
//! * Student t: `Z / sqrt(X / nu)` with `X = 2 * Gamma(nu / 2)`

use std::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metric::MetricSpace;

/// Identifier recorded in run manifests.
pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.9), key = seed_from_u64(seed), stream = task index; \
     normal = Box-Muller cosine branch; gamma = Marsaglia-Tsang";

/// Minimum pairwise distance for a valid cloud.
pub const MIN_SEPARATION: f64 = 1e-12;

const MAX_ATTEMPTS: usize = 100;

pub struct Stream(ChaCha8Rng);

impl Stream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Stream(rng)
    }

    /// Uniform on `(0, 1]`.
    pub fn unit(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        // unit() is in (0, 1]; flip to [0, 1) so the interval is half-open at hi
        lo + (hi - lo) * (1.0 - self.unit())
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.unit();
        let u2 = self.unit();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    pub fn gamma(&mut self, shape: f64, scale: f64) -> f64 {
        if shape < 1.0 {
            let boost = self.unit().powf(1.0 / shape);
            return self.gamma(shape + 1.0, scale) * boost;
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.normal();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = self.unit();
            if u.ln() < 0.5 * x * x + d - d * v + d * v.ln() {
                return d * v * scale;
            }
        }
    }

    pub fn student_t(&mut self, dof: f64) -> f64 {
        let z = self.normal();
        let chi2 = self.gamma(dof / 2.0, 2.0);
        z / (chi2 / dof).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Uniform,
    Mixture,
    Accumulating,
    Grid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    pub uniform_halfwidth: f64,
    pub t_dof: f64,
    pub t_scale: f64,
    pub gamma_shape: f64,
    pub gamma_scale: f64,
    pub accumulation_ratio: f64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            kind: SamplerKind::Mixture,
            uniform_halfwidth: 1.0,
            t_dof: 4.0,
            t_scale: 0.2,
            gamma_shape: 2.0,
            gamma_scale: 0.5,
            accumulation_ratio: 0.5,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn with_kind(kind: SamplerKind, seed: u64) -> Self {
        SamplerConfig {
            kind,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("uniform_halfwidth", self.uniform_halfwidth),
            ("t_dof", self.t_dof),
            ("gamma_shape", self.gamma_shape),
            ("gamma_scale", self.gamma_scale),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Argument(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.t_scale.is_finite() && self.t_scale >= 0.0) {
            return Err(Error::Argument(format!("t_scale must be nonnegative, got {}", self.t_scale)));
        }
        check_ratio(self.accumulation_ratio)
    }

    /// One mixture coordinate: `U(-h, h) + s T(nu) + (G(k, theta) - k theta)`.
    fn mixture_coordinate(&self, rng: &mut Stream) -> f64 {
        let h = self.uniform_halfwidth;
        let u = rng.uniform(-h, h);
        let t = self.t_scale * rng.student_t(self.t_dof);
        let g = rng.gamma(self.gamma_shape, self.gamma_scale) - self.gamma_shape * self.gamma_scale;
        u + t + g
    }
}

fn check_ratio(ratio: f64) -> Result<()> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Argument(format!("accumulation ratio must lie in (0, 1), got {ratio}")));
    }
    Ok(())
}

/// A finite window of a `Z`-indexed point family: point `k` of the list
/// carries index `offset + k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    space: MetricSpace,
    offset: i64,
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    /// Canonicalizes every point for `space` and rejects clouds with two
    /// points closer than [`MIN_SEPARATION`].
    pub fn new(space: MetricSpace, offset: i64, points: Vec<Vec<f64>>) -> Result<Self> {
        space.validate()?;
        if points.is_empty() {
            return Err(Error::Argument("a point cloud needs at least one point".into()));
        }
        let points = points
            .iter()
            .map(|p| space.canonicalize(p))
            .collect::<Result<Vec<_>>>()?;
        let cloud = PointCloud { space, offset, points };
        if let Some((i, j, d)) = cloud.closest_pair()? {
            if d < MIN_SEPARATION {
                return Err(Error::Degenerate(format!(
                    "points {} and {} are {d:e} apart",
                    cloud.index_of(i),
                    cloud.index_of(j)
                )));
            }
        }
        Ok(cloud)
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn index_of(&self, position: usize) -> i64 {
        self.offset + position as i64
    }

    /// Same points, re-indexed so the window is centered on 0.
    pub fn recentered(&self) -> PointCloud {
        self.with_offset(-((self.len() / 2) as i64))
    }

    pub fn with_offset(&self, offset: i64) -> PointCloud {
        PointCloud {
            offset,
            ..self.clone()
        }
    }

    /// `(i, j, d(i, j))` for the closest pair, `None` for a single point.
    pub fn closest_pair(&self) -> Result<Option<(usize, usize, f64)>> {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d = self.space.distance(&self.points[i], &self.points[j])?;
                if best.is_none_or(|(_, _, b)| d < b) {
                    best = Some((i, j, d));
                }
            }
        }
        Ok(best)
    }

    /// Largest pairwise distance in the cloud.
    pub fn diameter(&self) -> Result<f64> {
        let mut best = 0.0f64;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                best = best.max(self.space.distance(&self.points[i], &self.points[j])?);
            }
        }
        Ok(best)
    }

    /// SHA-256 over the space label, offset and raw coordinate bits.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.space.label().as_bytes());
        h.update(self.offset.to_le_bytes());
        for p in &self.points {
            for v in p {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        hex(&h.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Draws `count` points from `space` using `config` on stream 0.
pub fn sample_cloud(space: &MetricSpace, count: usize, config: &SamplerConfig) -> Result<PointCloud> {
    sample_cloud_stream(space, count, config, 0)
}

/// Same as [`sample_cloud`] on an explicit generator stream; tasks that need
/// independent clouds from one seed pass their task index here.
pub fn sample_cloud_stream(
    space: &MetricSpace,
    count: usize,
    config: &SamplerConfig,
    stream: u64,
) -> Result<PointCloud> {
    space.validate()?;
    config.validate()?;
    if count < 1 {
        return Err(Error::Argument("count must be at least 1".into()));
    }
    let deterministic = matches!(config.kind, SamplerKind::Accumulating | SamplerKind::Grid);
    let (offset, attempts) = match config.kind {
        SamplerKind::Accumulating => (1, 1),
        SamplerKind::Grid => (-((count / 2) as i64), 1),
        _ => (-((count / 2) as i64), MAX_ATTEMPTS),
    };
    let mut rng = Stream::new(config.seed, stream);
    let mut last_err = None;
    for _ in 0..attempts {
        let points = match config.kind {
            SamplerKind::Uniform => uniform_points(space, count, config, &mut rng),
            SamplerKind::Mixture => mixture_points(space, count, config, &mut rng),
            SamplerKind::Accumulating => accumulating_points(space, count, config.accumulation_ratio),
            SamplerKind::Grid => grid_points(space, count, config)?,
        };
        match PointCloud::new(space.clone(), offset, points) {
            Ok(cloud) => return Ok(cloud),
            Err(Error::Degenerate(msg)) => last_err = Some(msg),
            Err(e) => return Err(e),
        }
    }
    let tries = if deterministic { 1 } else { MAX_ATTEMPTS };
    Err(Error::Sampling(format!(
        "no distinct cloud after {tries} attempt(s): {}",
        last_err.unwrap_or_default()
    )))
}

fn uniform_points(space: &MetricSpace, count: usize, config: &SamplerConfig, rng: &mut Stream) -> Vec<Vec<f64>> {
    let h = config.uniform_halfwidth;
    (0..count)
        .map(|_| match space {
            MetricSpace::Sphere { .. } => (0..space.coord_len()).map(|_| rng.normal()).collect(),
            MetricSpace::FlatTorus { periods } => periods.iter().map(|l| rng.uniform(0.0, *l)).collect(),
            _ => (0..space.coord_len()).map(|_| rng.uniform(-h, h)).collect(),
        })
        .collect()
}

fn mixture_points(space: &MetricSpace, count: usize, config: &SamplerConfig, rng: &mut Stream) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..space.coord_len()).map(|_| config.mixture_coordinate(rng)).collect())
        .collect()
}

/// `r^k` for `k = 1..=count` along the first axis (as an angle on spheres).
fn accumulating_points(space: &MetricSpace, count: usize, ratio: f64) -> Vec<Vec<f64>> {
    let n = space.coord_len();
    (1..=count as i32)
        .map(|k| {
            let s = ratio.powi(k);
            let mut x = vec![0.0; n];
            match space {
                MetricSpace::Sphere { radius, .. } => {
                    x[0] = radius * s.cos();
                    x[1] = radius * s.sin();
                }
                _ => x[0] = s,
            }
            x
        })
        .collect()
}

fn grid_points(space: &MetricSpace, count: usize, config: &SamplerConfig) -> Result<Vec<Vec<f64>>> {
    match space {
        MetricSpace::Sphere { dim: 1, radius } => Ok((0..count)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / count as f64;
                vec![radius * a.cos(), radius * a.sin()]
            })
            .collect()),
        MetricSpace::Sphere { dim: 2, radius } => {
            // Fibonacci spiral
            let golden = PI * (3.0 - 5f64.sqrt());
            Ok((0..count)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    vec![radius * r * a.cos(), radius * r * a.sin(), radius * z]
                })
                .collect())
        }
        MetricSpace::Sphere { dim, .. } => Err(Error::Argument(format!("grid sampler does not support S^{dim}"))),
        _ => {
            let d = space.coord_len();
            let mut per_axis = (count as f64).powf(1.0 / d as f64).round() as usize;
            while per_axis.pow(d as u32) < count {
                per_axis += 1;
            }
            let spans: Vec<(f64, f64)> = match space {
                MetricSpace::FlatTorus { periods } => periods.iter().map(|l| (0.0, *l)).collect(),
                _ => vec![(-config.uniform_halfwidth, config.uniform_halfwidth); d],
            };
            Ok((0..count)
                .map(|mut k| {
                    spans
                        .iter()
                        .map(|(lo, hi)| {
                            let i = k % per_axis;
                            k /= per_axis;
                            lo + (hi - lo) * (i as f64 + 0.5) / per_axis as f64
                        })
                        .collect()
                })
                .collect())
        }
    }
}

/// Two-sided version indexed by `m = -max_level..=max_level`:
/// `xi_0 = 0` and `xi_m = sign(m) ratio^|m|`, so every principal minor adds a
/// pair of points closer to the accumulation point 0.
pub fn two_sided_accumulating(max_level: usize, ratio: f64) -> Result<PointCloud> {
    check_ratio(ratio)?;
    let p = max_level as i32;
    let points = (-p..=p)
        .map(|m| vec![if m == 0 { 0.0 } else { (m.signum() as f64) * ratio.powi(m.abs()) }])
        .collect();
    PointCloud::new(MetricSpace::real_line(), -(max_level as i64), points).map_err(|e| match e {
        Error::Degenerate(msg) => Error::Sampling(msg),
        other => other,
    })
}

/// `xi_k = ratio^k` for `k = 1..=count` on the real line, offset 1.
pub fn accumulating_sequence(count: usize, ratio: f64) -> Result<PointCloud> {
    check_ratio(ratio)?;
    if count < 1 {
        return Err(Error::Argument("count must be at least 1".into()));
    }
    let space = MetricSpace::real_line();
    let points = accumulating_points(&space, count, ratio);
    PointCloud::new(space, 1, points).map_err(|e| match e {
        Error::Degenerate(msg) => Error::Sampling(msg),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulating_examples() {
        let c = accumulating_sequence(3, 0.5).unwrap();
        assert_eq!(c.points(), &[vec![0.5], vec![0.25], vec![0.125]]);
        assert_eq!(c.offset(), 1);
        let c = accumulating_sequence(1, 0.9).unwrap();
        assert_eq!(c.points(), &[vec![0.9]]);
        assert!(accumulating_sequence(3, 1.0).is_err());
        assert!(accumulating_sequence(3, 0.0).is_err());
    }

    #[test]
    fn accumulating_squared_gaps_bounded() {
        // 39 is the longest ratio-0.5 prefix that keeps neighbours 1e-12 apart
        let c = accumulating_sequence(39, 0.5).unwrap();
        assert!(accumulating_sequence(40, 0.5).is_err());
        let s = c.space();
        for x in c.points() {
            for y in c.points() {
                assert!(s.distance(x, y).unwrap().powi(2) <= 0.25);
            }
        }
    }

    #[test]
    fn two_sided_window() {
        let c = two_sided_accumulating(2, 0.5).unwrap();
        assert_eq!(c.offset(), -2);
        assert_eq!(c.points(), &[vec![-0.25], vec![-0.5], vec![0.0], vec![0.5], vec![0.25]]);
        assert!(two_sided_accumulating(30, 0.5).is_ok());
    }

    #[test]
    fn single_point_line() {
        let cfg = SamplerConfig::default();
        let c = sample_cloud(&MetricSpace::real_line(), 1, &cfg).unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn same_seed_same_cloud() {
        let space = MetricSpace::minkowski(3, 1.0).unwrap();
        let cfg = SamplerConfig::with_kind(SamplerKind::Mixture, 7);
        let a = sample_cloud(&space, 50, &cfg).unwrap();
        let b = sample_cloud(&space, 50, &cfg).unwrap();
        assert_eq!(a, b);
        let c = sample_cloud_stream(&space, 50, &cfg, 1).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sphere_points_lie_on_sphere() {
        let space = MetricSpace::sphere(2, 3.0).unwrap();
        for kind in [SamplerKind::Uniform, SamplerKind::Mixture, SamplerKind::Grid] {
            let c = sample_cloud(&space, 40, &SamplerConfig::with_kind(kind, 3)).unwrap();
            for p in c.points() {
                let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((r - 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn grid_covers_count() {
        let space = MetricSpace::minkowski(2, 2.0).unwrap();
        let c = sample_cloud(&space, 10, &SamplerConfig::with_kind(SamplerKind::Grid, 0)).unwrap();
        assert_eq!(c.len(), 10);
        assert!(sample_cloud(
            &MetricSpace::sphere(3, 1.0).unwrap(),
            10,
            &SamplerConfig::with_kind(SamplerKind::Grid, 0)
        )
        .is_err());
    }

    #[test]
    fn duplicate_points_rejected() {
        let r = PointCloud::new(MetricSpace::real_line(), 0, vec![vec![1.0], vec![1.0]]);
        assert!(matches!(r, Err(Error::Degenerate(_))));
        // underflowing accumulating sequence collapses to duplicates
        assert!(matches!(accumulating_sequence(1200, 0.5), Err(Error::Sampling(_))));
    }

    #[test]
    fn invalid_configs() {
        let space = MetricSpace::real_line();
        let mut cfg = SamplerConfig::default();
        assert!(matches!(sample_cloud(&space, 0, &cfg), Err(Error::Argument(_))));
        cfg.t_dof = 0.0;
        assert!(sample_cloud(&space, 3, &cfg).is_err());
        let cfg = SamplerConfig {
            accumulation_ratio: 1.5,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn gamma_and_t_moments() {
        // Monte-Carlo sanity of the pinned recipes, far from the tails.
        let mut rng = Stream::new(11, 0);
        let n = 200_000;
        let g: f64 = (0..n).map(|_| rng.gamma(2.0, 0.5)).sum::<f64>() / n as f64;
        assert!((g - 1.0).abs() < 0.01, "gamma mean {g}");
        let g: f64 = (0..n).map(|_| rng.gamma(0.5, 1.0)).sum::<f64>() / n as f64;
        assert!((g - 0.5).abs() < 0.01, "gamma mean {g}");
        let t2: f64 = (0..n).map(|_| rng.student_t(4.0).powi(2)).sum::<f64>() / n as f64;
        // Var T(4) = 2
        assert!((t2 - 2.0).abs() < 0.1, "t variance {t2}");
    }
}
