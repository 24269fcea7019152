// Stretching a configuration changes every eigenvalue but not the inertia,
// so the spectral flow vanishes.

use distspec::flow::walk_spectrum;
use distspec::sampling::sample_cloud;
use distspec::walks::scaling_walk;
use distspec::{spectral_flow, FlowOptions, MetricSpace, Result, SamplerConfig, SamplerKind, ScalarFn};

pub fn run_example() -> Result<()> {
    let sphere = MetricSpace::sphere(2, 1.0)?;
    let base = sample_cloud(&sphere, 12, &SamplerConfig::with_kind(SamplerKind::Uniform, 5))?;
    let walk = scaling_walk(base, ScalarFn::Affine { intercept: 1.0, slope: 1.0 }, 0.0, 1.0)?;

    let start = walk_spectrum(&walk, 0.0)?;
    let end = walk_spectrum(&walk, 1.0)?;
    println!("radius 1 -> 2 on the sphere");
    println!("top eigenvalue {:.6} -> {:.6}", start.last().unwrap(), end.last().unwrap());
    for (a, b) in start.iter().zip(&end) {
        assert!((b - 4.0 * a).abs() <= 1e-9 * 4.0 * start.last().unwrap().abs());
    }
    let flow = spectral_flow(&walk, FlowOptions::default())?;
    println!(
        "inertia {:?} -> {:?}, net flow {}",
        flow.start_inertia.counts(),
        flow.end_inertia.counts(),
        flow.net_flow
    );
    assert_eq!(flow.net_flow, 0);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("stretch example failed");
}
