//! Squared-distance matrices viewed as finite windows of `Z`-indexed
//! abstract matrices.
//!
//! Row/column `k` of the stored array carries the index `offset + k`. Principal
//! minors use centered index sets `{m : |m| <= p}`, so minor `p` has size
//! `2p + 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::sampling::PointCloud;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "HSN_plus")]
    HsnPlus,
    #[serde(rename = "HSN")]
    Hsn,
    #[serde(rename = "invalid")]
    Invalid,
}

/// Where a matrix came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub space: Option<MetricSpace>,
    pub cloud_hash: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SquaredDistanceMatrix {
    offset: i64,
    entries: DenseMatrix,
    provenance: Provenance,
}

/// Maximum absolute row sum and every row's absolute sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowSums {
    pub norm: f64,
    pub row_sums: Vec<f64>,
}

impl SquaredDistanceMatrix {
    /// `D(n, m) = dist(xi_n, xi_m)^2` over the cloud's own space. Each
    /// unordered pair is evaluated once and mirrored; the diagonal is never
    /// computed.
    pub fn build(cloud: &PointCloud) -> Result<Self> {
        let space = cloud.space();
        let pts = cloud.points();
        let n = pts.len();
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (i + 1..n)
                    .map(|j| space.distance(&pts[i], &pts[j]).map(|d| d * d))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let mut entries = DenseMatrix::zeros(n);
        for (i, row) in upper.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                let j = i + 1 + k;
                entries[(i, j)] = *v;
                entries[(j, i)] = *v;
            }
        }
        Ok(SquaredDistanceMatrix {
            offset: cloud.offset(),
            entries,
            provenance: Provenance {
                space: Some(space.clone()),
                cloud_hash: Some(cloud.content_hash()),
            },
        })
    }

    /// Wraps an arbitrary hollow symmetric nonnegative array (for example
    /// one read from disk). Anything classified `invalid` is rejected.
    pub fn from_entries(offset: i64, entries: DenseMatrix) -> Result<Self> {
        if entries.size() == 0 {
            return Err(Error::Argument("matrix must have at least one row".into()));
        }
        if classify(&entries) == Classification::Invalid {
            return Err(Error::Argument("matrix is not hollow, symmetric and nonnegative".into()));
        }
        Ok(SquaredDistanceMatrix {
            offset,
            entries,
            provenance: Provenance {
                space: None,
                cloud_hash: None,
            },
        })
    }

    pub fn size(&self) -> usize {
        self.entries.size()
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn entries(&self) -> &DenseMatrix {
        &self.entries
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Entry at `Z`-indices `(n, m)`, if both lie in the stored window.
    pub fn get(&self, n: i64, m: i64) -> Option<f64> {
        let i = self.position(n)?;
        let j = self.position(m)?;
        Some(self.entries[(i, j)])
    }

    fn position(&self, index: i64) -> Option<usize> {
        let k = index - self.offset;
        (0..self.size() as i64).contains(&k).then_some(k as usize)
    }

    /// Largest `p` such that `{m : |m| <= p}` is stored, if any.
    pub fn max_level(&self) -> Option<usize> {
        let last = self.offset + self.size() as i64 - 1;
        let p = (-self.offset).min(last);
        (p >= 0).then_some(p as usize)
    }

    /// The `(2p + 1) x (2p + 1)` block on indices `|m|, |k| <= p`.
    pub fn principal_minor(&self, p: usize) -> Result<DenseMatrix> {
        let start = self.position(-(p as i64));
        let end = self.position(p as i64);
        match (start, end) {
            (Some(s), Some(_)) => Ok(self.entries.block(s, 2 * p + 1)),
            _ => Err(Error::Range(format!(
                "minor of order {p} needs indices -{p}..={p}, stored window is {}..={}",
                self.offset,
                self.offset + self.size() as i64 - 1
            ))),
        }
    }

    /// Block on the index range `lo..=hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Result<DenseMatrix> {
        match (self.position(lo), self.position(hi)) {
            (Some(s), Some(e)) if s <= e => Ok(self.entries.block(s, e - s + 1)),
            _ => Err(Error::Range(format!("index range {lo}..={hi} not stored"))),
        }
    }

    /// `alpha_k(n) = D(n, n - k)` over every stored `n` with `n - k` stored.
    pub fn diagonal_stream(&self, k: i64) -> Result<Vec<f64>> {
        let size = self.size() as i64;
        if k.abs() >= size {
            return Err(Error::Range(format!("diagonal {k} outside a window of size {size}")));
        }
        Ok((self.offset..self.offset + size)
            .filter_map(|n| self.get(n, n - k))
            .collect())
    }

    /// `beta_k(n) = D(k, n)` over the stored window.
    pub fn row_stream(&self, k: i64) -> Result<Vec<f64>> {
        let i = self
            .position(k)
            .ok_or_else(|| Error::Range(format!("row {k} outside the stored window")))?;
        Ok(self.entries.row(i).to_vec())
    }

    /// `gamma_k(n) = D(n, k)` over the stored window.
    pub fn column_stream(&self, k: i64) -> Result<Vec<f64>> {
        let j = self
            .position(k)
            .ok_or_else(|| Error::Range(format!("column {k} outside the stored window")))?;
        Ok(self.entries.column(j))
    }

    pub fn classify(&self) -> Classification {
        classify(&self.entries)
    }

    pub fn row_sup_norm(&self) -> RowSums {
        row_sup_norm(&self.entries)
    }
}

/// HSN membership of a square array, checked exactly.
pub fn classify(a: &DenseMatrix) -> Classification {
    let n = a.size();
    let mut strictly_positive = true;
    for i in 0..n {
        if a[(i, i)] != 0.0 {
            return Classification::Invalid;
        }
        for j in i + 1..n {
            let v = a[(i, j)];
            if v != a[(j, i)] || v.is_nan() || v < 0.0 {
                return Classification::Invalid;
            }
            if v == 0.0 {
                strictly_positive = false;
            }
        }
    }
    if strictly_positive {
        Classification::HsnPlus
    } else {
        Classification::Hsn
    }
}

pub fn row_sup_norm(a: &DenseMatrix) -> RowSums {
    let row_sums: Vec<f64> = (0..a.size()).map(|i| a.row(i).iter().map(|v| v.abs()).sum()).collect();
    let norm = row_sums.iter().copied().fold(0.0, f64::max);
    RowSums { norm, row_sums }
}
