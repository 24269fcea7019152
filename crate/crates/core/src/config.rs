//! Run configuration.
//!
//! A config file is TOML with optional top-level `seed` and one table per
//! concern: `[space]`, `[sampler]`, `[cloud]`, `[walk]`, `[flow]`,
//! `[ladder]`, `[census]`, `[growth]`, `[divergence]` and `[flow_scan]`.
//! Unknown keys are errors. A run manifest (`manifest.json`) is also accepted
//! in place of a config file; its `config` object is replayed verbatim.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::experiments::{CensusConfig, DivergenceConfig, FlowScanConfig, GrowthConfig};
use crate::metric::MetricSpace;
use crate::sampling::{sample_cloud_stream, PointCloud, SamplerConfig, Stream};
use crate::walks::{constant_walk, harmonic_walk, linear_walk, scaling_walk, ScalarFn, Walk};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Input matrix CSV for the commands that accept one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<MetricSpace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cloud: Option<CloudConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walk: Option<WalkConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ladder: Option<LadderSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census: Option<CensusConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<DivergenceConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flow_scan: Option<FlowScanConfig>,
}

/// Either inline `points` or a sampled cloud of `count` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CloudConfig {
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    /// `Z`-index of the first point; defaults to centering.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<i64>,
    pub stream: u64,
}

impl Default for CloudConfig {
    fn default() -> Self {
        CloudConfig {
            count: 20,
            points: None,
            offset: None,
            stream: 0,
        }
    }
}

fn zero() -> f64 {
    0.0
}

fn one() -> f64 {
    1.0
}

fn end_stream() -> u64 {
    1
}

/// Walk started from the `[cloud]` configuration at `t0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WalkConfig {
    Constant {
        #[serde(default = "zero")]
        t0: f64,
        #[serde(default = "one")]
        t1: f64,
    },
    /// Ends at `end_points` if given, else at a cloud sampled on `end_stream`.
    Linear {
        #[serde(default = "zero")]
        t0: f64,
        #[serde(default = "one")]
        t1: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        end_points: Option<Vec<Vec<f64>>>,
        #[serde(default = "end_stream")]
        end_stream: u64,
    },
    Scaling {
        #[serde(default = "zero")]
        t0: f64,
        #[serde(default = "one")]
        t1: f64,
        scale: ScalarFn,
    },
    /// Point `k` moves as `base_k + amplitude * g_k * sin(frequency * t + 2 pi k / n)`
    /// with `g_k` a standard normal vector from generator stream `stream`.
    Harmonic {
        #[serde(default = "zero")]
        t0: f64,
        #[serde(default = "one")]
        t1: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default = "end_stream")]
        stream: u64,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_tol: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderSection {
    /// Defaults to the largest level the cloud supports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
}

pub fn default_space() -> MetricSpace {
    MetricSpace::MinkowskiLp { dim: 3, p: 2.0 }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads a TOML config, or a JSON run manifest whose `config` is replayed.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        if text.trim_start().starts_with('{') {
            let manifest: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            let config = manifest
                .get("config")
                .cloned()
                .ok_or_else(|| Error::Parse(format!("{} has no config object", path.display())))?;
            return serde_json::from_value(config).map_err(|e| Error::Parse(e.to_string()));
        }
        Self::from_toml_str(&text).map_err(|e| e.context(path.display()))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("configs always serialize")
    }

    pub fn space_or_default(&self) -> MetricSpace {
        self.space.clone().unwrap_or_else(default_space)
    }

    /// Sampler settings with the top-level `seed` applied.
    pub fn sampler_or_default(&self) -> SamplerConfig {
        let mut s = self.sampler.clone().unwrap_or_default();
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s
    }

    pub fn cloud(&self) -> Result<PointCloud> {
        let space = self.space_or_default();
        let cfg = self.cloud.clone().unwrap_or_default();
        let cloud = match cfg.points {
            Some(points) => {
                let n = points.len() as i64;
                PointCloud::new(space, -(n / 2), points)?
            }
            None => sample_cloud_stream(&space, cfg.count, &self.sampler_or_default(), cfg.stream)?,
        };
        Ok(match cfg.offset {
            Some(o) => cloud.with_offset(o),
            None => cloud,
        })
    }

    pub fn walk(&self) -> Result<Walk> {
        let start = self.cloud()?;
        let walk = self
            .walk
            .clone()
            .ok_or_else(|| Error::Argument("config has no [walk] section".into()))?;
        match walk {
            WalkConfig::Constant { t0, t1 } => constant_walk(start, t0, t1),
            WalkConfig::Linear {
                t0,
                t1,
                end_points,
                end_stream,
            } => {
                let end = match end_points {
                    Some(points) => PointCloud::new(start.space().clone(), start.offset(), points)?,
                    None => sample_cloud_stream(start.space(), start.len(), &self.sampler_or_default(), end_stream)?
                        .with_offset(start.offset()),
                };
                linear_walk(start, end, t0, t1)
            }
            WalkConfig::Scaling { t0, t1, scale } => scaling_walk(start, scale, t0, t1),
            WalkConfig::Harmonic {
                t0,
                t1,
                amplitude,
                frequency,
                stream,
            } => {
                let n = start.len();
                let arity = start.space().coord_len();
                let mut rng = Stream::new(self.sampler_or_default().seed, stream);
                let displacements = (0..n)
                    .map(|_| (0..arity).map(|_| amplitude * rng.normal()).collect())
                    .collect();
                let phases = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
                harmonic_walk(start, displacements, vec![frequency; n], phases, t0, t1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SamplerKind;

    #[test]
    fn parses_full_config() {
        let cfg = RunConfig::from_toml_str(
            r#"
seed = 9

[space]
kind = "minkowski_lp"
dim = 2
p = 1.0

[sampler]
kind = "uniform"

[cloud]
count = 6

[walk]
kind = "scaling"
scale = { kind = "affine", intercept = 1.0, slope = 1.0 }

[flow]
steps = 64

[growth]
p_values = [1.0, 2.0]
sizes = [4, 8]
seeds = [0]
"#,
        )
        .unwrap();
        assert_eq!(cfg.sampler_or_default().seed, 9);
        assert_eq!(cfg.sampler_or_default().kind, SamplerKind::Uniform);
        assert_eq!(cfg.cloud().unwrap().len(), 6);
        assert_eq!(cfg.cloud().unwrap().offset(), -3);
        assert_eq!(cfg.walk().unwrap().len(), 6);
        assert_eq!(cfg.growth.as_ref().unwrap().dim, 3);
        assert_eq!(cfg.flow.as_ref().unwrap().steps, Some(64));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(RunConfig::from_toml_str("sede = 1"), Err(Error::Parse(_))));
        assert!(RunConfig::from_toml_str("[cloud]\ncont = 3").is_err());
        assert!(RunConfig::from_toml_str("[space]\nkind = \"hyperbolic\"").is_err());
    }

    #[test]
    fn inline_points_and_walks() {
        let cfg = RunConfig::from_toml_str(
            r#"
[space]
kind = "real_line"
[cloud]
points = [[0.0], [1.0], [3.0]]
[walk]
kind = "linear"
end_points = [[0.0], [2.0], [3.0]]
"#,
        )
        .unwrap();
        let walk = cfg.walk().unwrap();
        assert_eq!(walk.evaluate(1.0).unwrap().points()[1], vec![2.0]);
        assert_eq!(walk.evaluate(0.0).unwrap().offset(), -1);
    }

    #[test]
    fn json_round_trip() {
        let cfg = RunConfig {
            seed: Some(3),
            walk: Some(WalkConfig::Harmonic {
                t0: 0.0,
                t1: 2.0,
                amplitude: 0.1,
                frequency: 3.0,
                stream: 1,
            }),
            ..Default::default()
        };
        let back: RunConfig = serde_json::from_value(cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert!(back.walk().is_ok());
    }
}
