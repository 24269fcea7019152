mod metric_distances {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/metric_distances.rs"));
}

#[test]
fn metric_distances_example_runs() {
    metric_distances::run_example().expect("metric_distances example should run");
}

mod sampling {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sampling.rs"));
}

#[test]
fn sampling_example_runs() {
    sampling::run_example().expect("sampling example should run");
}

mod build_matrix {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/build_matrix.rs"));
}

#[test]
fn build_matrix_example_runs() {
    build_matrix::run_example().expect("build_matrix example should run");
}

mod spectrum {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/spectrum.rs"));
}

#[test]
fn spectrum_example_runs() {
    spectrum::run_example().expect("spectrum example should run");
}

mod ladder_census {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ladder_census.rs"));
}

#[test]
fn ladder_census_example_runs() {
    ladder_census::run_example().expect("ladder_census example should run");
}

mod spectral_flow {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/spectral_flow.rs"));
}

#[test]
fn spectral_flow_example_runs() {
    spectral_flow::run_example().expect("spectral_flow example should run");
}

mod sphere_stretch {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sphere_stretch.rs"));
}

#[test]
fn sphere_stretch_example_runs() {
    sphere_stretch::run_example().expect("sphere_stretch example should run");
}

mod inertia_growth {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/inertia_growth.rs"));
}

#[test]
fn inertia_growth_example_runs() {
    inertia_growth::run_example().expect("inertia_growth example should run");
}

mod row_sum_divergence {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/row_sum_divergence.rs"));
}

#[test]
fn row_sum_divergence_example_runs() {
    row_sum_divergence::run_example().expect("row_sum_divergence example should run");
}

mod zero_sequence_search {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/zero_sequence_search.rs"));
}

#[test]
fn zero_sequence_search_example_runs() {
    zero_sequence_search::run_example().expect("zero_sequence_search example should run");
}
