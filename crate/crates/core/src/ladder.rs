//! Spectra of the nested principal minors `D_0, D_1, ..., D_P`.
//!
//! The multiset union of all level spectra is the discrete spectrum of the
//! underlying `Z`-indexed matrix; values whose clusters keep collecting
//! members as the ladder grows are reported as accumulation candidates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::distance_matrix::{Provenance, SquaredDistanceMatrix};
use crate::error::{Error, Result};
use crate::sampling::PointCloud;
use crate::spectral::{eigenvalues, inertia_auto, spectral_scale, Inertia};

/// Default number of trailing levels that must agree for a census to count
/// as stabilized.
pub const DEFAULT_STABILIZATION_WINDOW: usize = 5;

/// Default single-linkage tolerance for [`accumulation_estimate`], relative to
/// the ladder scale.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderLevel {
    pub p: usize,
    pub size: usize,
    /// Ascending.
    pub values: Vec<f64>,
    pub inertia: Inertia,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumLadder {
    levels: Vec<LadderLevel>,
    provenance: Provenance,
}

impl SpectrumLadder {
    /// Ladder of the squared-distance matrix of `cloud` for `p = 0..=max_level`.
    pub fn build(cloud: &PointCloud, max_level: usize) -> Result<Self> {
        let matrix = SquaredDistanceMatrix::build(cloud)?;
        Self::from_matrix(&matrix, max_level)
    }

    pub fn from_matrix(matrix: &SquaredDistanceMatrix, max_level: usize) -> Result<Self> {
        match matrix.max_level() {
            Some(p) if p >= max_level => {}
            _ => {
                return Err(Error::Range(format!(
                    "ladder of height {max_level} needs indices -{max_level}..={max_level}, stored window starts at {} with {} rows",
                    matrix.offset(),
                    matrix.size()
                )))
            }
        }
        let levels = (0..=max_level)
            .into_par_iter()
            .map(|p| {
                let minor = matrix.principal_minor(p)?;
                level(p, &minor)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectrumLadder {
            levels,
            provenance: matrix.provenance().clone(),
        })
    }

    /// A one-level ladder holding the whole matrix: the spectrum of a finite
    /// point set. Its level is numbered `size / 2` and need not have odd size.
    pub fn finite(matrix: &SquaredDistanceMatrix) -> Result<Self> {
        let lvl = level(matrix.size() / 2, matrix.entries())?;
        Ok(SpectrumLadder {
            levels: vec![lvl],
            provenance: matrix.provenance().clone(),
        })
    }

    pub fn levels(&self) -> &[LadderLevel] {
        &self.levels
    }

    pub fn top(&self) -> &LadderLevel {
        self.levels.last().expect("ladders have at least one level")
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Largest `|lambda|` over every level.
    pub fn scale(&self) -> f64 {
        self.levels
            .iter()
            .map(|l| spectral_scale(&l.values))
            .fold(0.0, f64::max)
    }

    /// Every `(p, lambda)` of the multiset union, level by level.
    pub fn discrete_spectrum(&self) -> Vec<(usize, f64)> {
        self.levels
            .iter()
            .flat_map(|l| l.values.iter().map(move |v| (l.p, *v)))
            .collect()
    }
}

fn level(p: usize, minor: &DenseMatrix) -> Result<LadderLevel> {
    let values = eigenvalues(minor)?;
    let inertia = inertia_auto(&values);
    Ok(LadderLevel {
        p,
        size: minor.size(),
        values,
        inertia,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub epsilon: f64,
    /// Per level, the number of eigenvalues with `|lambda| > epsilon`.
    pub counts: Vec<usize>,
    pub window: usize,
    /// The last `window` counts exist and agree.
    pub stabilized: bool,
}

impl Census {
    pub fn tail_count(&self) -> Option<usize> {
        self.stabilized.then(|| *self.counts.last().expect("stabilized census is nonempty"))
    }
}

pub fn epsilon_census(ladder: &SpectrumLadder, epsilon: f64, window: usize) -> Result<Census> {
    if !(epsilon > 0.0) {
        return Err(Error::Argument(format!("epsilon must be positive, got {epsilon}")));
    }
    if window == 0 {
        return Err(Error::Argument("stabilization window must be at least 1".into()));
    }
    let counts: Vec<usize> = ladder
        .levels
        .iter()
        .map(|l| l.values.iter().filter(|v| v.abs() > epsilon).count())
        .collect();
    let stabilized = counts.len() >= window && counts[counts.len() - window..].windows(2).all(|w| w[0] == w[1]);
    Ok(Census {
        epsilon,
        counts,
        window,
        stabilized,
    })
}

/// Growth threshold for accumulation: a cluster qualifies once level `P`
/// alone holds more than `c * P^gamma` of its eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccumulationRule {
    pub c: f64,
    pub gamma: f64,
}

impl Default for AccumulationRule {
    fn default() -> Self {
        AccumulationRule { c: 0.5, gamma: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccumulationCandidate {
    /// Mean of the cluster members.
    pub center: f64,
    pub min: f64,
    pub max: f64,
    /// Members contributed by each level.
    pub members_per_level: Vec<usize>,
    pub total: usize,
    /// A candidate away from 0; impossible for squared-distance ladders.
    pub anomaly: bool,
}

/// Single-linkage clusters of the ladder's eigenvalue multiset, with
/// `cluster_tol` relative to [`SpectrumLadder::scale`]. A cluster is a
/// candidate when the top level alone puts more than `c * P^gamma` of its
/// eigenvalues into it and that per-level count is still rising over the
/// last two levels. A single eigenvalue trajectory converging across levels
/// contributes one member per level and never qualifies.
pub fn accumulation_estimate(
    ladder: &SpectrumLadder,
    cluster_tol: f64,
    rule: AccumulationRule,
) -> Result<Vec<AccumulationCandidate>> {
    let n_levels = ladder.levels.len();
    if n_levels < 3 {
        return Err(Error::Argument(format!(
            "accumulation needs at least 3 ladder levels, got {n_levels}"
        )));
    }
    if !(cluster_tol > 0.0) {
        return Err(Error::Argument("cluster tolerance must be positive".into()));
    }
    let abs_tol = cluster_tol * ladder.scale().max(f64::MIN_POSITIVE);
    let mut all: Vec<(f64, usize)> = ladder
        .levels
        .iter()
        .enumerate()
        .flat_map(|(k, l)| l.values.iter().map(move |v| (*v, k)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));

    let top_p = ladder.top().p.max(1) as f64;
    let threshold = rule.c * top_p.powf(rule.gamma);
    let mut out = Vec::new();
    let mut start = 0;
    for end in 1..=all.len() {
        if end < all.len() && all[end].0 - all[end - 1].0 <= abs_tol {
            continue;
        }
        let members = &all[start..end];
        start = end;
        let mut per_level = vec![0usize; n_levels];
        for (_, k) in members {
            per_level[*k] += 1;
        }
        let top_count = per_level[n_levels - 1];
        let still_growing = top_count > per_level[n_levels - 3];
        if top_count as f64 > threshold && still_growing {
            let center = members.iter().map(|m| m.0).sum::<f64>() / members.len() as f64;
            out.push(AccumulationCandidate {
                center,
                min: members[0].0,
                max: members[members.len() - 1].0,
                members_per_level: per_level,
                total: members.len(),
                anomaly: center.abs() > abs_tol,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumStructure {
    PurelyContinuous,
    PurelyDiscrete,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    pub structure: SpectrumStructure,
    pub epsilon: f64,
    /// Eigenvalues outside `(-epsilon, epsilon)` per level.
    pub census: Vec<usize>,
    /// Eigenvalues inside `(-epsilon, epsilon)` per level.
    pub near_zero: Vec<usize>,
}

/// Three-way structure call from the finite ladder: everything of the top
/// level inside `(-epsilon, epsilon)` is purely continuous (`{0}`); no level
/// of size two or more touching `(-epsilon, epsilon)` is purely discrete;
/// anything else is mixed.
pub fn classify_structure(ladder: &SpectrumLadder, epsilon: f64) -> Result<StructureReport> {
    let census = epsilon_census(ladder, epsilon, 1)?.counts;
    let near_zero: Vec<usize> = ladder.levels.iter().zip(&census).map(|(l, c)| l.size - c).collect();
    let top = ladder.levels.len() - 1;
    let structure = if census[top] == 0 {
        SpectrumStructure::PurelyContinuous
    } else if ladder
        .levels
        .iter()
        .zip(&near_zero)
        .all(|(l, z)| l.size < 2 || *z == 0)
    {
        SpectrumStructure::PurelyDiscrete
    } else {
        SpectrumStructure::Mixed
    };
    Ok(StructureReport {
        structure,
        epsilon,
        census,
        near_zero,
    })
}

/// Largest violation of `outer[i] <= inner[i] <= outer[i + 1]` for an
/// ascending `inner` spectrum of an `n x n` principal submatrix of the
/// `(n + 1) x (n + 1)` matrix with ascending spectrum `outer`. Zero when the
/// two interlace.
pub fn interlacing_violation(inner: &[f64], outer: &[f64]) -> f64 {
    assert_eq!(inner.len() + 1, outer.len(), "interlacing needs sizes n and n + 1");
    inner
        .iter()
        .enumerate()
        .map(|(i, b)| (outer[i] - b).max(b - outer[i + 1]).max(0.0))
        .fold(0.0, f64::max)
}

/// One-row extension of a minor and the spectra on both sides.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionStep {
    pub inner_range: (i64, i64),
    pub outer_range: (i64, i64),
    pub inner: Vec<f64>,
    pub outer: Vec<f64>,
}

impl ExtensionStep {
    pub fn violation(&self) -> f64 {
        interlacing_violation(&self.inner, &self.outer)
    }
}

/// Splits each `D_p -> D_{p+1}` step into `[-p, p] -> [-p, p+1] -> [-p-1, p+1]`
/// so every step adds one row and column.
pub fn one_step_extensions(matrix: &SquaredDistanceMatrix, max_level: usize) -> Result<Vec<ExtensionStep>> {
    if matrix.max_level().is_none_or(|p| p < max_level) {
        return Err(Error::Range(format!("matrix does not store a ladder of height {max_level}")));
    }
    let mut ranges = vec![(0i64, 0i64)];
    for p in 0..max_level as i64 {
        ranges.push((-p, p + 1));
        ranges.push((-p - 1, p + 1));
    }
    let spectra = ranges
        .par_iter()
        .map(|&(lo, hi)| eigenvalues(&matrix.window(lo, hi)?))
        .collect::<Result<Vec<_>>>()?;
    Ok((1..ranges.len())
        .map(|k| ExtensionStep {
            inner_range: ranges[k - 1],
            outer_range: ranges[k],
            inner: spectra[k - 1].clone(),
            outer: spectra[k].clone(),
        })
        .collect())
}
