//! Squared-distance matrices of point sets in a small catalog of metric
//! spaces, together with the machinery to study their spectra:
//!
//! * [`metric`]: Minkowski `L^p`, round spheres, flat tori and the real line.
//! * [`sampling`]: seeded point clouds (uniform, three-component mixture,
//!   geometric accumulating sequences, grids).
//! * [`walks`]: time-parameterized point clouds and point-level homotopies.
//! * [`distance_matrix`]: hollow symmetric matrices with a `Z`-indexed window,
//!   principal minors, diagonals/rows and row-sum norms.
//! * [`spectral`]: symmetric eigensolver, inertia, Perron pair, trace and
//!   Gershgorin diagnostics.
//! * [`ladder`]: spectra of nested principal minors, epsilon census,
//!   accumulation estimates and structure classification.
//! * [`flow`]: signed zero crossings of eigenvalues along a walk.
//! * [`experiments`]: packaged inertia-growth, row-sum divergence, census and
//!   flow-scan runs.
//! * [`io`], [`config`], [`svg`], [`cli`]: file formats, run manifests and
//!   the `distspec` command.

pub mod cli;
pub mod config;
pub mod dense;
pub mod distance_matrix;
pub mod error;
pub mod experiments;
pub mod flow;
pub mod io;
pub mod ladder;
pub mod metric;
pub mod sampling;
pub mod spectral;
pub mod svg;
pub mod walks;

pub use dense::DenseMatrix;
pub use distance_matrix::{Classification, SquaredDistanceMatrix};
pub use error::{Error, Result};
pub use flow::{spectral_flow, FlowOptions, FlowResult};
pub use ladder::SpectrumLadder;
pub use metric::MetricSpace;
pub use sampling::{PointCloud, SamplerConfig, SamplerKind};
pub use spectral::{EigenSystem, Inertia};
pub use walks::{ScalarFn, Walk};
