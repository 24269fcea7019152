//! The `distspec` command.
//!
//! Every subcommand resolves its configuration (config file, then flags,
//! then defaults), runs, and writes its outputs plus a `manifest.json` into
//! the output directory in one pass at the end. The main JSON record also
//! goes to stdout. Exit codes: 0 success, 1 usage or input error, 2 numeric
//! or solver failure, 3 degenerate configuration.

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CloudConfig, LadderSection, RunConfig};
use crate::dense::DenseMatrix;
use crate::distance_matrix::{Classification, SquaredDistanceMatrix};
use crate::error::{Error, Result};
use crate::experiments::{
    census_stabilization, divergence_probe, flow_scan, inertia_growth, InertiaCurve,
};
use crate::flow::{spectral_flow, FlowOptions, DEFAULT_STEPS};
use crate::io::{
    census_csv, classification_record, cloud_csv, divergence_csv, growth_csv, ladder_csv, matrix_csv,
    read_matrix, spectrum_record, to_json, MatrixManifest, OutputSet, RunManifest,
};
use crate::ladder::{
    accumulation_estimate, classify_structure, epsilon_census, AccumulationRule, SpectrumLadder, DEFAULT_CLUSTER_TOL,
    DEFAULT_STABILIZATION_WINDOW,
};
use crate::svg::{render_svg, Series};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DISTSPEC_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "distspec-out";
const DEFAULT_EPSILON: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "distspec", version, about = "Spectra of squared-distance matrices and spectral flow along point walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every sampler (replaces the seed list of growth/diverge)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory [default: $DISTSPEC_OUT_DIR or ./distspec-out]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Absolute zero tolerance for spectral flow
    #[arg(long, global = true)]
    zero_tol: Option<f64>,
    /// Census threshold
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Time-grid steps for spectral flow
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// TOML config file, or a manifest.json to replay
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Matrix CSV input (no header, comma separated)
    #[arg(long, global = true)]
    matrix: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a point cloud
    Sample,
    /// Build the squared-distance matrix of a cloud
    Matrix,
    /// Eigenvalues, inertia and diagnostics of a matrix
    Spectrum,
    /// Spectra of the centered principal minors
    Ladder,
    /// Epsilon census on the geometric accumulating sequence
    Census,
    /// Spectral flow along a walk
    Flow {
        /// Run the random flow scan from [flow_scan] instead
        #[arg(long)]
        scan: bool,
    },
    /// Inertia growth across L^p metrics
    Growth,
    /// Max row sums on a bounded space
    Diverge,
    /// Classify a matrix as HSN_plus, HSN or invalid
    Verify,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Matrix => "matrix",
            Command::Spectrum => "spectrum",
            Command::Ladder => "ladder",
            Command::Census => "census",
            Command::Flow { scan: false } => "flow",
            Command::Flow { scan: true } => "flow --scan",
            Command::Growth => "growth",
            Command::Diverge => "diverge",
            Command::Verify => "verify",
        }
    }
}

struct Outcome {
    report: Value,
    outputs: OutputSet,
    config: RunConfig,
    seeds: Vec<u64>,
    exit: i32,
}

fn report<T: Serialize>(value: &T) -> Result<Value> {
    Ok(serde_json::to_value(value)?)
}

/// Runs the command with `argv[0]` as the program name; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let base = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    let outcome = match cli.threads {
        Some(0) => return Err(Error::Argument("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Argument(e.to_string()))?
            .install(|| dispatch(cli, base))?,
        None => dispatch(cli, base)?,
    };
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let manifest = RunManifest::new(
        cli.command.name(),
        outcome.config.to_json(),
        outcome.seeds,
        outcome.outputs.names(),
    );
    outcome.outputs.write(&out_dir, &manifest)?;
    out.write_all(to_json(&outcome.report)?.as_bytes())?;
    Ok(outcome.exit)
}

fn dispatch(cli: &Cli, mut cfg: RunConfig) -> Result<Outcome> {
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(path) = &cli.matrix {
        cfg.matrix = Some(path.display().to_string());
    }
    match &cli.command {
        Command::Sample => sample(cfg),
        Command::Matrix => matrix(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Ladder => ladder(cli, cfg),
        Command::Census => census(cli, cfg),
        Command::Flow { scan: false } => flow(cli, cfg),
        Command::Flow { scan: true } => scan(cli, cfg),
        Command::Growth => growth(cfg),
        Command::Diverge => diverge(cfg),
        Command::Verify => verify(cfg),
    }
}

/// Fills the cloud-related sections with their defaults.
fn resolve_cloud(cfg: &mut RunConfig) {
    cfg.space = Some(cfg.space_or_default());
    cfg.sampler = Some(cfg.sampler_or_default());
    cfg.cloud = Some(cfg.cloud.clone().unwrap_or_else(CloudConfig::default));
}

fn sampler_seeds(cfg: &RunConfig) -> Vec<u64> {
    if cfg.cloud.as_ref().is_some_and(|c| c.points.is_some()) {
        Vec::new()
    } else {
        vec![cfg.sampler_or_default().seed]
    }
}

/// The matrix named by `matrix`, else the squared-distance matrix of the
/// configured cloud. File matrices are centered.
fn input_matrix(cfg: &mut RunConfig) -> Result<SquaredDistanceMatrix> {
    match &cfg.matrix {
        Some(path) => {
            let m = read_matrix(path.as_ref())?;
            let n = m.size() as i64;
            SquaredDistanceMatrix::from_entries(-(n / 2), m)
        }
        None => {
            resolve_cloud(cfg);
            SquaredDistanceMatrix::build(&cfg.cloud()?)
        }
    }
}

fn sample(mut cfg: RunConfig) -> Result<Outcome> {
    resolve_cloud(&mut cfg);
    let cloud = cfg.cloud()?;
    let mut outputs = OutputSet::new();
    outputs.add("cloud.csv", cloud_csv(&cloud));
    Ok(Outcome {
        report: json!({
            "space": cloud.space(),
            "points": cloud.len(),
            "offset": cloud.offset(),
            "cloud_hash": cloud.content_hash(),
        }),
        outputs,
        seeds: sampler_seeds(&cfg),
        config: cfg,
        exit: 0,
    })
}

fn matrix(mut cfg: RunConfig) -> Result<Outcome> {
    let m = input_matrix(&mut cfg)?;
    let manifest = MatrixManifest::of(&m);
    let mut outputs = OutputSet::new();
    outputs.add("matrix.csv", matrix_csv(m.entries()));
    outputs.add("matrix.json", to_json(&manifest)?);
    Ok(Outcome {
        report: report(&manifest)?,
        outputs,
        seeds: sampler_seeds(&cfg),
        config: cfg,
        exit: 0,
    })
}

fn spectrum(mut cfg: RunConfig) -> Result<Outcome> {
    let m = match &cfg.matrix {
        // any symmetric matrix is accepted here, not only valid distance matrices
        Some(path) => read_matrix(path.as_ref())?,
        None => input_matrix(&mut cfg)?.entries().clone(),
    };
    let record = spectrum_record(&m)?;
    let mut outputs = OutputSet::new();
    outputs.add("spectrum.json", to_json(&record)?);
    Ok(Outcome {
        report: report(&record)?,
        outputs,
        seeds: sampler_seeds(&cfg),
        config: cfg,
        exit: 0,
    })
}

fn ladder(cli: &Cli, mut cfg: RunConfig) -> Result<Outcome> {
    let m = input_matrix(&mut cfg)?;
    let mut section = cfg.ladder.clone().unwrap_or_default();
    if let Some(eps) = cli.epsilon {
        section.epsilon = Some(eps);
    }
    let max_level = match section.max_level {
        Some(p) => p,
        None => m.max_level().ok_or_else(|| {
            Error::Range(format!("window starting at {} holds no centered minor", m.offset()))
        })?,
    };
    let section = LadderSection {
        max_level: Some(max_level),
        epsilon: Some(section.epsilon.unwrap_or(DEFAULT_EPSILON)),
        cluster_tol: Some(section.cluster_tol.unwrap_or(DEFAULT_CLUSTER_TOL)),
        window: Some(section.window.unwrap_or(DEFAULT_STABILIZATION_WINDOW)),
    };
    let (epsilon, cluster_tol, window) = (
        section.epsilon.unwrap_or_default(),
        section.cluster_tol.unwrap_or_default(),
        section.window.unwrap_or_default(),
    );
    cfg.ladder = Some(section);
    let ladder = SpectrumLadder::from_matrix(&m, max_level)?;
    let census = epsilon_census(&ladder, epsilon, window)?;
    let candidates = if ladder.levels().len() >= 3 {
        accumulation_estimate(&ladder, cluster_tol, AccumulationRule::default())?
    } else {
        Vec::new()
    };
    let structure = classify_structure(&ladder, epsilon)?;
    let summary = json!({
        "max_level": max_level,
        "census": census,
        "candidates": candidates,
        "structure": structure.structure,
        "near_zero": structure.near_zero,
    });
    let mut outputs = OutputSet::new();
    outputs.add("ladder.csv", ladder_csv(&ladder));
    outputs.add("census.csv", census_csv(&census));
    outputs.add("ladder.json", to_json(&summary)?);
    Ok(Outcome {
        report: summary,
        outputs,
        seeds: sampler_seeds(&cfg),
        config: cfg,
        exit: 0,
    })
}

fn census(cli: &Cli, mut cfg: RunConfig) -> Result<Outcome> {
    let mut section = cfg.census.clone().unwrap_or_default();
    if let Some(eps) = cli.epsilon {
        section.epsilon = eps;
    }
    let result = census_stabilization(&section)?;
    cfg.census = Some(section);
    let mut outputs = OutputSet::new();
    outputs.add("census.csv", census_csv(&result.census));
    outputs.add("census.json", to_json(&result)?);
    Ok(Outcome {
        report: json!({
            "census": result.census,
            "tail_count": result.census.tail_count(),
            "candidates": result.candidates,
        }),
        outputs,
        seeds: Vec::new(),
        config: cfg,
        exit: 0,
    })
}

fn flow(cli: &Cli, mut cfg: RunConfig) -> Result<Outcome> {
    resolve_cloud(&mut cfg);
    let mut section = cfg.flow.clone().unwrap_or_default();
    section.steps = cli.steps.or(section.steps).or(Some(DEFAULT_STEPS));
    section.zero_tol = cli.zero_tol.or(section.zero_tol);
    cfg.flow = Some(section.clone());
    let walk = cfg.walk()?;
    let result = spectral_flow(
        &walk,
        FlowOptions {
            steps: section.steps.unwrap_or(DEFAULT_STEPS),
            zero_tol: section.zero_tol,
        },
    )?;
    let mut outputs = OutputSet::new();
    outputs.add("flow.json", to_json(&result)?);
    Ok(Outcome {
        report: json!({
            "net_flow": result.net_flow,
            "inertia_change": result.inertia_change(),
            "crossings": result.crossings,
            "start_inertia": result.start_inertia,
            "end_inertia": result.end_inertia,
            "zero_tol": result.zero_tol,
            "degenerate_endpoints": result.degenerate_endpoints,
            "steps": result.grid.len() - 1,
        }),
        outputs,
        seeds: sampler_seeds(&cfg),
        config: cfg,
        exit: 0,
    })
}

fn scan(cli: &Cli, mut cfg: RunConfig) -> Result<Outcome> {
    let mut section = cfg.flow_scan.clone().unwrap_or_default();
    if let Some(seed) = cfg.seed {
        section.sampler.seed = seed;
    }
    if let Some(steps) = cli.steps {
        section.steps = steps;
    }
    if cli.zero_tol.is_some() {
        section.zero_tol = cli.zero_tol;
    }
    let result = flow_scan(&section)?;
    let seeds = vec![section.sampler.seed];
    cfg.flow_scan = Some(section);
    let mut outputs = OutputSet::new();
    outputs.add("flow_scan.json", to_json(&result)?);
    Ok(Outcome {
        report: report(&result)?,
        outputs,
        seeds,
        config: cfg,
        exit: 0,
    })
}

/// Mean `n_plus` (solid) and `n_minus` (dashed) per `p`, either as raw counts
/// or divided by the size.
pub fn growth_series(curves: &[InertiaCurve], fractions: bool) -> Vec<Series> {
    let scale = |size: usize| if fractions { size as f64 } else { 1.0 };
    curves
        .iter()
        .flat_map(|c| {
            let plus = c.points.iter().map(|pt| (pt.size as f64, pt.mean_plus / scale(pt.size))).collect();
            let minus = c.points.iter().map(|pt| (pt.size as f64, pt.mean_minus / scale(pt.size))).collect();
            [
                Series::new(format!("n+  p={}", c.p), plus),
                Series::new(format!("n-  p={}", c.p), minus).dashed(),
            ]
        })
        .collect()
}

fn growth(mut cfg: RunConfig) -> Result<Outcome> {
    let mut section = cfg.growth.clone().unwrap_or_default();
    if let Some(seed) = cfg.seed {
        section.seeds = vec![seed];
    }
    let curves = inertia_growth(&section)?;
    let seeds = section.seeds.clone();
    cfg.growth = Some(section);
    let counts = render_svg(&growth_series(&curves, false), "Inertia growth", "size", "mean count")?;
    let fractions = render_svg(&growth_series(&curves, true), "Inertia growth", "size", "mean count / size")?;
    let mut outputs = OutputSet::new();
    outputs.add("growth.csv", growth_csv(&curves));
    outputs.add("growth.json", to_json(&curves)?);
    outputs.add("growth_counts.svg", counts);
    outputs.add("growth_fractions.svg", fractions);
    let summary: Vec<Value> = curves
        .iter()
        .map(|c| {
            let last = c.points.last().expect("grids are nonempty");
            json!({ "p": c.p, "size": last.size, "mean_plus": last.mean_plus,
                    "min_plus": last.min_plus, "max_plus": last.max_plus, "mean_minus": last.mean_minus })
        })
        .collect();
    Ok(Outcome {
        report: Value::Array(summary),
        outputs,
        seeds,
        config: cfg,
        exit: 0,
    })
}

fn diverge(mut cfg: RunConfig) -> Result<Outcome> {
    let mut section = cfg.divergence.clone().unwrap_or_default();
    if let Some(seed) = cfg.seed {
        section.seeds = vec![seed];
    }
    let table = divergence_probe(&section)?;
    let seeds = section.seeds.clone();
    cfg.divergence = Some(section);
    let summary = json!({
        "table": table,
        "mean_ratios": table.mean_ratios(),
        "seed_ratios": table.seed_ratios(),
    });
    let mut outputs = OutputSet::new();
    outputs.add("divergence.csv", divergence_csv(&table));
    outputs.add("divergence.json", to_json(&summary)?);
    Ok(Outcome {
        report: summary,
        outputs,
        seeds,
        config: cfg,
        exit: 0,
    })
}

fn verify(mut cfg: RunConfig) -> Result<Outcome> {
    let m: DenseMatrix = match &cfg.matrix {
        Some(path) => read_matrix(path.as_ref())?,
        None => input_matrix(&mut cfg)?.entries().clone(),
    };
    let record = classification_record(&m);
    let mut outputs = OutputSet::new();
    outputs.add("verify.json", to_json(&record)?);
    Ok(Outcome {
        exit: if record.classification == Classification::Invalid { 1 } else { 0 },
        report: report(&record)?,
        outputs,
        seeds: sampler_seeds(&cfg),
        config: cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, _, err) = run_capture(&["distspec", "frobnicate"]);
        assert_eq!(code, 1);
        assert!(err.contains("Usage"));
        assert_eq!(run_capture(&["distspec", "spectrum", "--bogus"]).0, 1);
        assert_eq!(run_capture(&["distspec"]).0, 1);
    }

    #[test]
    fn help_and_version_exit_zero() {
        let (code, out, _) = run_capture(&["distspec", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("growth"));
        assert_eq!(run_capture(&["distspec", "--version"]).0, 0);
    }

    #[test]
    fn zero_threads_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        assert_eq!(run_capture(&["distspec", "sample", "--threads", "0", "--out-dir", d]).0, 1);
    }
}
