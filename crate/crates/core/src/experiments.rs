//! Packaged experiment runs: inertia growth across `L^p` metrics, row-sum
//! divergence on bounded spaces, epsilon-census stabilization on an
//! accumulating sequence, and random spectral-flow scans.
//!
//! Every run is a pure function of its configuration. Grid cells and trials
//! are solved in parallel and collected in `(p, size, seed)` order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance_matrix::SquaredDistanceMatrix;
use crate::error::{Error, Result};
use crate::flow::{spectral_flow, FlowOptions, DEFAULT_STEPS};
use crate::ladder::{
    accumulation_estimate, epsilon_census, AccumulationCandidate, AccumulationRule, Census, SpectrumLadder,
    DEFAULT_CLUSTER_TOL, DEFAULT_STABILIZATION_WINDOW,
};
use crate::metric::MetricSpace;
use crate::sampling::{sample_cloud_stream, two_sided_accumulating, SamplerConfig, SamplerKind};
use crate::spectral::{eigenvalues, inertia_auto};
use crate::walks::{constant_walk, linear_walk, scaling_walk, ScalarFn};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthConfig {
    pub dim: usize,
    pub p_values: Vec<f64>,
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub sampler: SamplerConfig,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            dim: 3,
            p_values: vec![1.0, 1.5, 2.0, 3.0, 4.0],
            sizes: (10..=300).step_by(10).collect(),
            seeds: (0..5).collect(),
            sampler: SamplerConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InertiaSample {
    pub seed: u64,
    pub n_plus: usize,
    pub n_zero: usize,
    pub n_minus: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InertiaPoint {
    pub size: usize,
    /// One entry per seed, in seed-list order.
    pub samples: Vec<InertiaSample>,
    pub mean_plus: f64,
    pub min_plus: usize,
    pub max_plus: usize,
    pub mean_minus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InertiaCurve {
    pub p: f64,
    pub points: Vec<InertiaPoint>,
}

impl InertiaCurve {
    pub fn at(&self, size: usize) -> Option<&InertiaPoint> {
        self.points.iter().find(|pt| pt.size == size)
    }
}

/// Inertia of `L^p` squared-distance matrices over a grid of metrics, sizes
/// and seeds. For a given `(size, seed)` the cloud is drawn from generator
/// stream `size`, so every `p` sees the same coordinates.
pub fn inertia_growth(config: &GrowthConfig) -> Result<Vec<InertiaCurve>> {
    if config.p_values.is_empty() || config.sizes.is_empty() || config.seeds.is_empty() {
        return Err(Error::Argument("growth grid needs at least one p, size and seed".into()));
    }
    if let Some(s) = config.sizes.iter().find(|s| **s < 2) {
        return Err(Error::Argument(format!("growth sizes must be at least 2, got {s}")));
    }
    let spaces = config
        .p_values
        .iter()
        .map(|p| MetricSpace::minkowski(config.dim, *p))
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(usize, usize, usize)> = (0..spaces.len())
        .flat_map(|i| {
            (0..config.sizes.len()).flat_map(move |j| (0..config.seeds.len()).map(move |k| (i, j, k)))
        })
        .collect();
    let samples = cells
        .par_iter()
        .map(|&(i, j, k)| {
            let (p, size, seed) = (config.p_values[i], config.sizes[j], config.seeds[k]);
            let sampler = SamplerConfig {
                seed,
                ..config.sampler.clone()
            };
            let run = || -> Result<InertiaSample> {
                let cloud = sample_cloud_stream(&spaces[i], size, &sampler, size as u64)?;
                let matrix = SquaredDistanceMatrix::build(&cloud)?;
                let inertia = inertia_auto(&eigenvalues(matrix.entries())?);
                Ok(InertiaSample {
                    seed,
                    n_plus: inertia.n_plus,
                    n_zero: inertia.n_zero,
                    n_minus: inertia.n_minus,
                })
            };
            run().map_err(|e| e.context(format!("p = {p}, size = {size}, seed = {seed}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let per_seed = config.seeds.len();
    let per_p = config.sizes.len() * per_seed;
    Ok(config
        .p_values
        .iter()
        .enumerate()
        .map(|(i, p)| InertiaCurve {
            p: *p,
            points: config
                .sizes
                .iter()
                .enumerate()
                .map(|(j, size)| {
                    let start = i * per_p + j * per_seed;
                    let samples = samples[start..start + per_seed].to_vec();
                    let plus = samples.iter().map(|s| s.n_plus);
                    InertiaPoint {
                        size: *size,
                        mean_plus: plus.clone().sum::<usize>() as f64 / per_seed as f64,
                        min_plus: plus.clone().min().unwrap_or(0),
                        max_plus: plus.max().unwrap_or(0),
                        mean_minus: samples.iter().map(|s| s.n_minus).sum::<usize>() as f64 / per_seed as f64,
                        samples,
                    }
                })
                .collect(),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DivergenceConfig {
    pub space: MetricSpace,
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl Default for DivergenceConfig {
    fn default() -> Self {
        DivergenceConfig {
            space: MetricSpace::Sphere { dim: 2, radius: 1.0 },
            sizes: vec![250, 500, 1000],
            seeds: (0..5).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub size: usize,
    /// Max row sum per seed, in seed-list order.
    pub max_row_sums: Vec<f64>,
    pub mean_max_row_sum: f64,
    /// `(max row sum) / size`, averaged over seeds.
    pub mean_normalized: f64,
    pub min_normalized: f64,
    pub max_normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceTable {
    pub space: MetricSpace,
    pub seeds: Vec<u64>,
    pub rows: Vec<DivergenceRow>,
}

impl DivergenceTable {
    /// Ratio of seed-mean max row sums between consecutive sizes.
    pub fn mean_ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| w[1].mean_max_row_sum / w[0].mean_max_row_sum)
            .collect()
    }

    /// Per consecutive size pair, the ratio of max row sums for each seed.
    pub fn seed_ratios(&self) -> Vec<Vec<f64>> {
        self.rows
            .windows(2)
            .map(|w| {
                w[0].max_row_sums
                    .iter()
                    .zip(&w[1].max_row_sums)
                    .map(|(a, b)| b / a)
                    .collect()
            })
            .collect()
    }
}

/// Max row sums of squared-distance matrices of uniform clouds on a bounded
/// space. Each `(size, seed)` uses generator stream `size`, so clouds of
/// different sizes are independent.
pub fn divergence_probe(config: &DivergenceConfig) -> Result<DivergenceTable> {
    if !config.space.is_bounded() {
        return Err(Error::Precondition(format!(
            "divergence probe needs a bounded space, {} has unbounded diameter",
            config.space.label()
        )));
    }
    if config.sizes.is_empty() || config.seeds.is_empty() {
        return Err(Error::Argument("divergence probe needs at least one size and seed".into()));
    }
    let cells: Vec<(usize, u64)> = config
        .sizes
        .iter()
        .flat_map(|size| config.seeds.iter().map(move |seed| (*size, *seed)))
        .collect();
    let sums = cells
        .par_iter()
        .map(|&(size, seed)| {
            let sampler = SamplerConfig::with_kind(SamplerKind::Uniform, seed);
            let cloud = sample_cloud_stream(&config.space, size, &sampler, size as u64)
                .map_err(|e| e.context(format!("size = {size}, seed = {seed}")))?;
            Ok(SquaredDistanceMatrix::build(&cloud)?.row_sup_norm().norm)
        })
        .collect::<Result<Vec<f64>>>()?;
    let rows = config
        .sizes
        .iter()
        .zip(sums.chunks(config.seeds.len()))
        .map(|(size, chunk)| {
            let normalized: Vec<f64> = chunk.iter().map(|s| s / *size as f64).collect();
            DivergenceRow {
                size: *size,
                max_row_sums: chunk.to_vec(),
                mean_max_row_sum: chunk.iter().sum::<f64>() / chunk.len() as f64,
                mean_normalized: normalized.iter().sum::<f64>() / chunk.len() as f64,
                min_normalized: normalized.iter().copied().fold(f64::INFINITY, f64::min),
                max_normalized: normalized.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect();
    Ok(DivergenceTable {
        space: config.space.clone(),
        seeds: config.seeds.clone(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CensusConfig {
    pub ratio: f64,
    pub max_level: usize,
    pub epsilon: f64,
    pub window: usize,
    pub cluster_tol: f64,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            ratio: 0.5,
            max_level: 30,
            epsilon: 1e-4,
            window: DEFAULT_STABILIZATION_WINDOW,
            cluster_tol: DEFAULT_CLUSTER_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusReport {
    pub config: CensusConfig,
    pub census: Census,
    pub candidates: Vec<AccumulationCandidate>,
    /// Top-level spectrum, ascending.
    pub top_values: Vec<f64>,
}

/// Census of the ladder over `0, ±ratio, ±ratio^2, ..., ±ratio^P`.
pub fn census_stabilization(config: &CensusConfig) -> Result<CensusReport> {
    let cloud = two_sided_accumulating(config.max_level, config.ratio)?;
    let ladder = SpectrumLadder::build(&cloud, config.max_level)?;
    let census = epsilon_census(&ladder, config.epsilon, config.window)?;
    let candidates = if ladder.levels().len() >= 3 {
        accumulation_estimate(&ladder, config.cluster_tol, AccumulationRule::default())?
    } else {
        Vec::new()
    };
    Ok(CensusReport {
        config: config.clone(),
        census,
        candidates,
        top_values: ladder.top().values.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkFamily {
    /// `s(t) = 1 + t` applied to a sampled cloud.
    Scaling,
    Constant,
    /// Straight-line motion between two independent clouds.
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowScanConfig {
    pub space: MetricSpace,
    pub family: WalkFamily,
    pub size: usize,
    pub trials: usize,
    pub steps: usize,
    pub zero_tol: Option<f64>,
    pub sampler: SamplerConfig,
}

impl Default for FlowScanConfig {
    fn default() -> Self {
        FlowScanConfig {
            space: MetricSpace::MinkowskiLp { dim: 3, p: 1.0 },
            family: WalkFamily::Linear,
            size: 30,
            trials: 50,
            steps: DEFAULT_STEPS,
            zero_tol: None,
            sampler: SamplerConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowScan {
    /// Net flow per trial.
    pub flows: Vec<i64>,
    /// `|net_flow| -> number of trials`.
    pub histogram: BTreeMap<u64, usize>,
    pub max_abs: u64,
}

/// Spectral flow over random walks on `[0, 1]`. Trial `k` draws its clouds
/// from streams `2k` and `2k + 1`.
pub fn flow_scan(config: &FlowScanConfig) -> Result<FlowScan> {
    if config.trials < 1 {
        return Err(Error::Argument("flow scan needs at least one trial".into()));
    }
    let options = FlowOptions {
        steps: config.steps,
        zero_tol: config.zero_tol,
    };
    let flows = (0..config.trials)
        .into_par_iter()
        .map(|k| {
            let run = || -> Result<i64> {
                let a = sample_cloud_stream(&config.space, config.size, &config.sampler, 2 * k as u64)?;
                let walk = match config.family {
                    WalkFamily::Scaling => scaling_walk(
                        a,
                        ScalarFn::Affine {
                            intercept: 1.0,
                            slope: 1.0,
                        },
                        0.0,
                        1.0,
                    )?,
                    WalkFamily::Constant => constant_walk(a, 0.0, 1.0)?,
                    WalkFamily::Linear => {
                        let b = sample_cloud_stream(&config.space, config.size, &config.sampler, 2 * k as u64 + 1)?;
                        linear_walk(a, b, 0.0, 1.0)?
                    }
                };
                Ok(spectral_flow(&walk, options)?.net_flow)
            };
            run().map_err(|e| e.context(format!("trial {k}")))
        })
        .collect::<Result<Vec<i64>>>()?;
    let mut histogram = BTreeMap::new();
    for f in &flows {
        *histogram.entry(f.unsigned_abs()).or_insert(0) += 1;
    }
    Ok(FlowScan {
        max_abs: flows.iter().map(|f| f.unsigned_abs()).max().unwrap_or(0),
        flows,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_growth() -> GrowthConfig {
        GrowthConfig {
            p_values: vec![1.0, 2.0],
            sizes: vec![2, 6, 12],
            seeds: vec![0, 1, 2],
            ..Default::default()
        }
    }

    #[test]
    fn growth_counts_add_up_and_euclidean_has_one_positive() {
        let curves = inertia_growth(&small_growth()).unwrap();
        assert_eq!(curves.len(), 2);
        for curve in &curves {
            for pt in &curve.points {
                for s in &pt.samples {
                    assert_eq!(s.n_plus + s.n_zero + s.n_minus, pt.size);
                }
            }
            let two = curve.at(2).unwrap();
            assert!(two.samples.iter().all(|s| (s.n_plus, s.n_minus) == (1, 1)));
        }
        assert!(curves[1].points.iter().all(|pt| pt.min_plus == 1 && pt.max_plus == 1));
    }

    #[test]
    fn growth_is_deterministic() {
        assert_eq!(inertia_growth(&small_growth()).unwrap(), inertia_growth(&small_growth()).unwrap());
    }

    #[test]
    fn growth_rejects_bad_grid() {
        let mut cfg = small_growth();
        cfg.sizes = vec![1];
        assert!(matches!(inertia_growth(&cfg), Err(Error::Argument(_))));
        cfg.sizes = vec![];
        assert!(inertia_growth(&cfg).is_err());
    }

    #[test]
    fn divergence_needs_bounded_space() {
        let cfg = DivergenceConfig {
            space: MetricSpace::MinkowskiLp { dim: 2, p: 2.0 },
            ..Default::default()
        };
        assert!(matches!(divergence_probe(&cfg), Err(Error::Precondition(_))));
    }

    #[test]
    fn divergence_rows_respect_entrywise_bound() {
        let cfg = DivergenceConfig {
            sizes: vec![2, 20, 40],
            seeds: vec![0, 1],
            ..Default::default()
        };
        let table = divergence_probe(&cfg).unwrap();
        let diam2 = std::f64::consts::PI.powi(2);
        for row in &table.rows {
            for s in &row.max_row_sums {
                assert!(*s > 0.0 && *s <= row.size as f64 * diam2);
            }
            assert!(row.min_normalized <= row.mean_normalized && row.mean_normalized <= row.max_normalized);
        }
        assert_eq!(table.mean_ratios().len(), 2);
        assert_eq!(table.seed_ratios()[0].len(), 2);
    }

    #[test]
    fn census_with_huge_epsilon_is_all_zero() {
        let cfg = CensusConfig {
            max_level: 8,
            epsilon: 1e6,
            ..Default::default()
        };
        let report = census_stabilization(&cfg).unwrap();
        assert!(report.census.counts.iter().all(|c| *c == 0));
        assert!(report.census.stabilized);
    }

    #[test]
    fn census_rejects_bad_ratio() {
        let cfg = CensusConfig {
            ratio: 1.5,
            ..Default::default()
        };
        assert!(census_stabilization(&cfg).is_err());
    }

    #[test]
    fn scaling_and_constant_scans_have_no_flow() {
        for family in [WalkFamily::Scaling, WalkFamily::Constant] {
            let cfg = FlowScanConfig {
                family,
                size: 8,
                trials: 4,
                steps: 32,
                ..Default::default()
            };
            let scan = flow_scan(&cfg).unwrap();
            assert_eq!(scan.flows, vec![0; 4]);
            assert_eq!(scan.histogram.get(&0), Some(&4));
            assert_eq!(scan.max_abs, 0);
        }
    }
}
