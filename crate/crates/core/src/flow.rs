//! Spectral flow: the signed number of eigenvalues that cross zero along a
//! walk, counted with multiplicity, negative-to-positive as `+1`.
//!
//! Eigenvalues at consecutive grid samples are paired by sorted rank. A rank
//! whose sign (outside `[-zero_tol, zero_tol]`) differs from its previous
//! nonzero sign has crossed; the bracket is then narrowed by bisection.
//! Trajectories that touch zero and return to their old sign contribute
//! nothing.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance_matrix::SquaredDistanceMatrix;
use crate::error::{Error, Result};
use crate::spectral::{eigenvalues, inertia_with_tolerance, spectral_scale, Inertia};
use crate::walks::Walk;

pub const DEFAULT_STEPS: usize = 256;

/// Default zero tolerance relative to the largest `|lambda|` on the grid.
pub const DEFAULT_RELATIVE_ZERO_TOL: f64 = 1e-10;

/// Crossing brackets are bisected down to this fraction of `t1 - t0`.
pub const BRACKET_WIDTH: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub steps: usize,
    /// Absolute zero tolerance; `None` picks `1e-10 * max |lambda|` over the grid.
    pub zero_tol: Option<f64>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            steps: DEFAULT_STEPS,
            zero_tol: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t_lo: f64,
    pub t_hi: f64,
    /// `+1` for negative-to-positive.
    pub direction: i8,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowResult {
    pub grid: Vec<f64>,
    /// Ascending eigenvalues at each grid time.
    pub spectra: Vec<Vec<f64>>,
    pub crossings: Vec<Crossing>,
    pub net_flow: i64,
    pub start_inertia: Inertia,
    pub end_inertia: Inertia,
    pub zero_tol: f64,
    /// Some endpoint eigenvalue lies within `zero_tol` of 0; the identity
    /// `net_flow = n_plus(t1) - n_plus(t0)` is then not guaranteed.
    pub degenerate_endpoints: bool,
}

impl FlowResult {
    /// `n_plus(t1) - n_plus(t0)`.
    pub fn inertia_change(&self) -> i64 {
        self.end_inertia.n_plus as i64 - self.start_inertia.n_plus as i64
    }
}

struct Sampler<'a> {
    walk: &'a Walk,
    cache: Mutex<HashMap<u64, Vec<f64>>>,
}

impl Sampler<'_> {
    fn spectrum(&self, t: f64) -> Result<Vec<f64>> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(&t.to_bits()) {
            return Ok(v.clone());
        }
        let values = walk_spectrum(self.walk, t)?;
        self.cache.lock().expect("cache lock").insert(t.to_bits(), values.clone());
        Ok(values)
    }
}

/// Ascending eigenvalues of the walk matrix at time `t`.
pub fn walk_spectrum(walk: &Walk, t: f64) -> Result<Vec<f64>> {
    let cloud = walk.evaluate(t)?;
    let matrix = SquaredDistanceMatrix::build(&cloud)?;
    eigenvalues(matrix.entries()).map_err(|e| match e {
        Error::Solver(msg) => Error::Solver(format!("{msg} (at t = {t})")),
        Error::Numeric(msg) => Error::Numeric(format!("{msg} (at t = {t})")),
        other => other,
    })
}

fn sign(v: f64, tol: f64) -> i8 {
    if v > tol {
        1
    } else if v < -tol {
        -1
    } else {
        0
    }
}

pub fn spectral_flow(walk: &Walk, options: FlowOptions) -> Result<FlowResult> {
    if options.steps < 2 {
        return Err(Error::Argument(format!("flow needs at least 2 steps, got {}", options.steps)));
    }
    if let Some(tol) = options.zero_tol {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::Argument(format!("zero tolerance must be nonnegative, got {tol}")));
        }
    }
    let grid: Vec<f64> = (0..=options.steps).map(|k| walk.grid_time(k, options.steps)).collect();
    let spectra = grid
        .par_iter()
        .map(|&t| walk_spectrum(walk, t))
        .collect::<Result<Vec<_>>>()?;
    let zero_tol = options.zero_tol.unwrap_or_else(|| {
        DEFAULT_RELATIVE_ZERO_TOL * spectra.iter().map(|s| spectral_scale(s)).fold(0.0, f64::max)
    });

    let n = walk.len();
    // (rank, bracket start, bracket end, sign before)
    let mut raw: Vec<(usize, f64, f64, i8)> = Vec::new();
    for rank in 0..n {
        let mut last: Option<(f64, i8)> = None;
        for (t, s) in grid.iter().zip(&spectra) {
            let sg = sign(s[rank], zero_tol);
            if sg == 0 {
                continue;
            }
            if let Some((t_prev, s_prev)) = last {
                if s_prev != sg {
                    raw.push((rank, t_prev, *t, s_prev));
                }
            }
            last = Some((*t, sg));
        }
    }

    let sampler = Sampler {
        walk,
        cache: Mutex::new(grid.iter().zip(&spectra).map(|(t, s)| (t.to_bits(), s.clone())).collect()),
    };
    let width = (walk.t1() - walk.t0()) * BRACKET_WIDTH;
    let mut refined = raw
        .par_iter()
        .map(|&(rank, a, b, before)| {
            let (lo, hi) = bisect(&sampler, rank, a, b, before, zero_tol, width)?;
            Ok(Crossing {
                t_lo: lo,
                t_hi: hi,
                direction: -before,
                multiplicity: 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    refined.sort_by(|x, y| x.t_lo.total_cmp(&y.t_lo).then(x.direction.cmp(&y.direction)));
    let crossings = merge(refined);
    let net_flow = crossings
        .iter()
        .map(|c| c.direction as i64 * c.multiplicity as i64)
        .sum();

    let first = &spectra[0];
    let last = &spectra[spectra.len() - 1];
    let degenerate_endpoints = first.iter().chain(last).any(|v| v.abs() <= zero_tol);
    Ok(FlowResult {
        start_inertia: inertia_with_tolerance(first, zero_tol),
        end_inertia: inertia_with_tolerance(last, zero_tol),
        grid,
        spectra,
        crossings,
        net_flow,
        zero_tol,
        degenerate_endpoints,
    })
}

fn bisect(
    sampler: &Sampler<'_>,
    rank: usize,
    mut a: f64,
    mut b: f64,
    before: i8,
    zero_tol: f64,
    width: f64,
) -> Result<(f64, f64)> {
    while b - a > width {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        match sign(sampler.spectrum(m)?[rank], zero_tol) {
            s if s == before => a = m,
            0 => break,
            _ => b = m,
        }
    }
    Ok((a, b))
}

/// Same-direction crossings with overlapping brackets become one crossing
/// of higher multiplicity.
fn merge(sorted: Vec<Crossing>) -> Vec<Crossing> {
    let mut out: Vec<Crossing> = Vec::new();
    for c in sorted {
        if let Some(prev) = out
            .iter_mut()
            .rev()
            .find(|p| p.direction == c.direction && c.t_lo <= p.t_hi && p.t_lo <= c.t_hi)
        {
            prev.t_lo = prev.t_lo.min(c.t_lo);
            prev.t_hi = prev.t_hi.max(c.t_hi);
            prev.multiplicity += c.multiplicity;
        } else {
            out.push(c);
        }
    }
    out
}

/// Flow of the concatenation of two runs that meet at a common time with
/// matching spectra.
pub fn flow_concat(a: &FlowResult, b: &FlowResult) -> Result<i64> {
    let ta = *a.grid.last().expect("grid is nonempty");
    let tb = b.grid[0];
    if (ta - tb).abs() > 1e-12 * ta.abs().max(tb.abs()).max(1.0) {
        return Err(Error::Argument(format!("runs meet at different times {ta} and {tb}")));
    }
    let sa = a.spectra.last().expect("spectra are nonempty");
    let sb = &b.spectra[0];
    if sa.len() != sb.len() {
        return Err(Error::Argument("junction spectra have different sizes".into()));
    }
    let tol = 1e-9 * spectral_scale(sa).max(1.0);
    if sa.iter().zip(sb).any(|(x, y)| (x - y).abs() > tol) {
        return Err(Error::Argument("junction spectra differ".into()));
    }
    Ok(a.net_flow + b.net_flow)
}
