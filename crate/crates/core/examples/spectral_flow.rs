// Spectral flow along a straight-line walk between two clouds.

use distspec::flow::{flow_concat, walk_spectrum};
use distspec::sampling::sample_cloud_stream;
use distspec::walks::linear_walk;
use distspec::{spectral_flow, FlowOptions, MetricSpace, Result, SamplerConfig};

pub fn run_example() -> Result<()> {
    let space = MetricSpace::minkowski(3, 1.0)?;
    let config = SamplerConfig {
        seed: 1,
        ..Default::default()
    };
    let a = sample_cloud_stream(&space, 10, &config, 0)?;
    let b = sample_cloud_stream(&space, 10, &config, 1)?;
    let walk = linear_walk(a, b, 0.0, 1.0)?;

    let flow = spectral_flow(&walk, FlowOptions::default())?;
    println!("net flow {} over {} grid steps", flow.net_flow, flow.grid.len() - 1);
    for c in &flow.crossings {
        println!("  crossing in [{:.8}, {:.8}], direction {:+}, multiplicity {}", c.t_lo, c.t_hi, c.direction, c.multiplicity);
    }
    println!(
        "n+ goes {} -> {}",
        flow.start_inertia.n_plus, flow.end_inertia.n_plus
    );
    assert_eq!(flow.net_flow, flow.inertia_change());

    let back = spectral_flow(&walk.reversed(), FlowOptions::default())?;
    assert_eq!(back.net_flow, -flow.net_flow);

    let left = spectral_flow(&walk.restricted(0.0, 0.5)?, FlowOptions::default())?;
    let right = spectral_flow(&walk.restricted(0.5, 1.0)?, FlowOptions::default())?;
    assert_eq!(flow_concat(&left, &right)?, flow.net_flow);

    let fine = spectral_flow(&walk, FlowOptions { steps: 2000, zero_tol: None })?;
    assert_eq!(fine.net_flow, flow.net_flow);

    let mid = walk_spectrum(&walk, 0.5)?;
    println!("spectrum at t = 0.5: {:.4?}", mid);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("flow example failed");
}
