//! File formats and run manifests.
//!
//! CSV files use LF line endings and write every real number with
//! `{:.16e}` (17 significant digits), which round-trips any `f64` exactly.
//! Matrix files have no header; all other tables do. JSON records are written
//! by `serde_json`, whose float output is the shortest round-trip decimal.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::dense::DenseMatrix;
use crate::distance_matrix::{classify, row_sup_norm, Classification, SquaredDistanceMatrix};
use crate::error::{Error, Result};
use crate::experiments::{DivergenceTable, InertiaCurve};
use crate::ladder::{Census, SpectrumLadder};
use crate::metric::MetricSpace;
use crate::sampling::{hex, PointCloud, RNG_ALGORITHM};
use crate::spectral::{eigensystem, gershgorin_bound, inertia_auto, trace_defect, Inertia};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_num(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: {field:?} is not a number")))
}

fn push_row(out: &mut String, fields: impl IntoIterator<Item = String>) {
    let mut first = true;
    for f in fields {
        if !first {
            out.push(',');
        }
        out.push_str(&f);
        first = false;
    }
    out.push('\n');
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

pub fn matrix_csv(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.size() {
        push_row(&mut out, m.row(i).iter().map(|v| fmt_num(*v)));
    }
    out
}

pub fn parse_matrix_csv(text: &str) -> Result<DenseMatrix> {
    let rows = data_lines(text)
        .map(|(n, line)| line.split(',').map(|f| parse_num(f, n)).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(Error::Parse("matrix file is empty".into()));
    }
    DenseMatrix::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    parse_matrix_csv(&fs::read_to_string(path)?).map_err(|e| e.context(path.display()))
}

/// Header `index,x1,...,xd` with `index` the `Z`-index of each point.
pub fn cloud_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    let arity = cloud.space().coord_len();
    push_row(&mut out, std::iter::once("index".to_string()).chain((1..=arity).map(|k| format!("x{k}"))));
    for (i, p) in cloud.points().iter().enumerate() {
        push_row(
            &mut out,
            std::iter::once(cloud.index_of(i).to_string()).chain(p.iter().map(|v| fmt_num(*v))),
        );
    }
    out
}

/// Reads a cloud written by [`cloud_csv`]; indices must be consecutive.
pub fn parse_cloud_csv(text: &str, space: &MetricSpace) -> Result<PointCloud> {
    let mut lines = data_lines(text);
    let (_, header) = lines.next().ok_or_else(|| Error::Parse("cloud file is empty".into()))?;
    let arity = space.coord_len();
    if header.split(',').count() != arity + 1 || !header.starts_with("index") {
        return Err(Error::Parse(format!("cloud header {header:?} does not match {}", space.label())));
    }
    let mut offset = None;
    let mut points = Vec::new();
    for (n, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != arity + 1 {
            return Err(Error::Parse(format!("line {n}: expected {} fields, found {}", arity + 1, fields.len())));
        }
        let index: i64 = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {n}: bad index {:?}", fields[0])))?;
        let start = *offset.get_or_insert(index);
        if index != start + points.len() as i64 {
            return Err(Error::Parse(format!("line {n}: index {index} is not consecutive")));
        }
        points.push(fields[1..].iter().map(|f| parse_num(f, n)).collect::<Result<Vec<f64>>>()?);
    }
    PointCloud::new(space.clone(), offset.unwrap_or(0), points)
}

/// Walk snapshots: header `t,index,x1,...,xd`.
pub fn snapshots_csv(snapshots: &[(f64, PointCloud)]) -> String {
    let mut out = String::new();
    let arity = snapshots.first().map_or(0, |(_, c)| c.space().coord_len());
    push_row(
        &mut out,
        ["t".to_string(), "index".to_string()]
            .into_iter()
            .chain((1..=arity).map(|k| format!("x{k}"))),
    );
    for (t, cloud) in snapshots {
        for (i, p) in cloud.points().iter().enumerate() {
            push_row(
                &mut out,
                [fmt_num(*t), cloud.index_of(i).to_string()]
                    .into_iter()
                    .chain(p.iter().map(|v| fmt_num(*v))),
            );
        }
    }
    out
}

/// Header `p,level_size,lambda_rank,lambda`; ranks ascend from 0.
pub fn ladder_csv(ladder: &SpectrumLadder) -> String {
    let mut out = String::from("p,level_size,lambda_rank,lambda\n");
    for level in ladder.levels() {
        for (r, v) in level.values.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", level.p, level.size, r, fmt_num(*v));
        }
    }
    out
}

/// Header `p,count_outside_eps`.
pub fn census_csv(census: &Census) -> String {
    let mut out = String::from("p,count_outside_eps\n");
    for (p, c) in census.counts.iter().enumerate() {
        let _ = writeln!(out, "{p},{c}");
    }
    out
}

/// Header `p,size,seed,n_plus,n_zero,n_minus`, one row per grid cell.
pub fn growth_csv(curves: &[InertiaCurve]) -> String {
    let mut out = String::from("p,size,seed,n_plus,n_zero,n_minus\n");
    for curve in curves {
        for pt in &curve.points {
            for s in &pt.samples {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    fmt_num(curve.p),
                    pt.size,
                    s.seed,
                    s.n_plus,
                    s.n_zero,
                    s.n_minus
                );
            }
        }
    }
    out
}

/// Header `size,seed,max_row_sum,normalized`.
pub fn divergence_csv(table: &DivergenceTable) -> String {
    let mut out = String::from("size,seed,max_row_sum,normalized\n");
    for row in &table.rows {
        for (seed, s) in table.seeds.iter().zip(&row.max_row_sums) {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                row.size,
                seed,
                fmt_num(*s),
                fmt_num(s / row.size as f64)
            );
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub size: usize,
    pub classification: Classification,
    /// Ascending.
    pub values: Vec<f64>,
    pub inertia: Inertia,
    pub trace_defect: f64,
    pub gershgorin_bound: f64,
    /// `max_k |A v_k - lambda_k v_k|`.
    pub residual: Option<f64>,
    pub tolerance: f64,
}

/// Full eigen-decomposition summary of a symmetric matrix.
pub fn spectrum_record(m: &DenseMatrix) -> Result<SpectrumRecord> {
    if !m.is_finite() {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    if !m.is_symmetric() {
        return Err(Error::Argument("matrix is not symmetric".into()));
    }
    let sys = eigensystem(m, true)?;
    let inertia = inertia_auto(&sys.values);
    Ok(SpectrumRecord {
        size: m.size(),
        classification: classify(m),
        trace_defect: trace_defect(&sys.values),
        gershgorin_bound: gershgorin_bound(m),
        residual: sys.residual,
        tolerance: inertia.tolerance,
        inertia,
        values: sys.values,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub size: usize,
    pub classification: Classification,
    pub symmetric: bool,
    pub hollow: bool,
    pub finite: bool,
    pub min_off_diagonal: Option<f64>,
    pub row_sup_norm: f64,
}

pub fn classification_record(m: &DenseMatrix) -> ClassificationRecord {
    let n = m.size();
    let min_off_diagonal = (0..n)
        .flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)])
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
    ClassificationRecord {
        size: n,
        classification: classify(m),
        symmetric: m.is_symmetric(),
        hollow: (0..n).all(|i| m[(i, i)] == 0.0),
        finite: m.is_finite(),
        min_off_diagonal,
        row_sup_norm: row_sup_norm(m).norm,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixManifest {
    pub size: usize,
    pub offset: i64,
    pub space: Option<MetricSpace>,
    pub cloud_hash: Option<String>,
    pub classification: Classification,
}

impl MatrixManifest {
    pub fn of(m: &SquaredDistanceMatrix) -> Self {
        MatrixManifest {
            size: m.size(),
            offset: m.offset(),
            space: m.provenance().space.clone(),
            cloud_hash: m.provenance().cloud_hash.clone(),
            classification: m.classify(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Fully resolved configuration; feeding it back through `--config`
    /// replays the run.
    pub config: Value,
    pub seeds: Vec<u64>,
    pub config_hash: String,
    pub tool_version: String,
    pub rng_algorithm: String,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
}

/// Hex SHA-256 of the compact JSON encoding of `config`. Object keys are
/// sorted by `serde_json::Value`, so the text is canonical.
pub fn config_hash(config: &Value) -> String {
    let text = serde_json::to_string(config).expect("JSON values always serialize");
    hex(&Sha256::digest(text.as_bytes()))
}

impl RunManifest {
    pub fn new(command: &str, config: Value, seeds: Vec<u64>, outputs: Vec<String>) -> Self {
        RunManifest {
            command: command.to_string(),
            config_hash: config_hash(&config),
            config,
            seeds,
            tool_version: TOOL_VERSION.to_string(),
            rng_algorithm: RNG_ALGORITHM.to_string(),
            outputs,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Output files collected during a run and written together at the end.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Writes every file plus `manifest.json` listing them.
    pub fn write(self, dir: &Path, manifest: &RunManifest) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.files.len() + 1);
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            fs::write(&path, bytes)?;
            written.push(path);
        }
        let path = dir.join("manifest.json");
        fs::write(&path, to_json(manifest)?)?;
        written.push(path);
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_cloud, SamplerConfig};

    #[test]
    fn number_format_round_trips() {
        for x in [0.0, -0.0, 1.0, 0.1, -1.0 / 3.0, 1e-300, f64::MAX, 5e-324, std::f64::consts::PI] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn matrix_round_trip_is_exact() {
        let m = DenseMatrix::from_fn(4, |i, j| if i == j { 0.0 } else { 1.0 / (1 + i + j) as f64 });
        let text = matrix_csv(&m);
        assert!(!text.contains('\r'));
        assert_eq!(parse_matrix_csv(&text).unwrap(), m);
    }

    #[test]
    fn matrix_parse_errors() {
        assert!(matches!(parse_matrix_csv(""), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix_csv("0,1\n1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix_csv("0,x\n1,0\n"), Err(Error::Parse(_))));
        assert!(parse_matrix_csv("0,1\r\n1,0\r\n").is_ok());
    }

    #[test]
    fn cloud_round_trip() {
        let space = MetricSpace::sphere(2, 2.0).unwrap();
        let cloud = sample_cloud(&space, 7, &SamplerConfig::default()).unwrap();
        let text = cloud_csv(&cloud);
        assert!(text.starts_with("index,x1,x2,x3\n-3,"));
        let back = parse_cloud_csv(&text, &space).unwrap();
        assert_eq!(back.offset(), cloud.offset());
        assert_eq!(back.content_hash(), cloud.content_hash());
        assert!(parse_cloud_csv(&text, &MetricSpace::real_line()).is_err());
    }

    #[test]
    fn census_and_ladder_tables() {
        let census = Census {
            epsilon: 0.1,
            counts: vec![0, 2, 3],
            window: 2,
            stabilized: false,
        };
        assert_eq!(census_csv(&census), "p,count_outside_eps\n0,0\n1,2\n2,3\n");
    }

    #[test]
    fn collinear_spectrum_record() {
        let m = DenseMatrix::from_rows(&[[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]]).unwrap();
        let rec = spectrum_record(&m).unwrap();
        let six = 6f64.sqrt();
        for (got, want) in rec.values.iter().zip([-4.0, 2.0 - six, 2.0 + six]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(rec.classification, Classification::HsnPlus);
        assert!(rec.trace_defect.abs() < 1e-15);
        assert_eq!(rec.gershgorin_bound, 5.0);
        assert!(rec.residual.unwrap() < 1e-12);
    }

    #[test]
    fn classification_record_flags() {
        let m = DenseMatrix::from_rows(&[[0.0, 0.0], [0.0, 0.0]]).unwrap();
        let rec = classification_record(&m);
        assert_eq!(rec.classification, Classification::Hsn);
        assert_eq!(rec.min_off_diagonal, Some(0.0));
        let bad = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 0.0]]).unwrap();
        assert!(!classification_record(&bad).hollow);
    }

    #[test]
    fn config_hash_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"b":1,"a":[1,2]}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"a":[1,2],"b":1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }
}
