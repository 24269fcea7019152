// Nested principal minors: epsilon census, accumulation candidates,
// structure call and interlacing.

use distspec::ladder::{
    accumulation_estimate, classify_structure, epsilon_census, one_step_extensions, AccumulationRule,
    SpectrumStructure, DEFAULT_CLUSTER_TOL,
};
use distspec::sampling::{sample_cloud, two_sided_accumulating};
use distspec::{MetricSpace, Result, SamplerConfig, SamplerKind, SpectrumLadder, SquaredDistanceMatrix};

pub fn run_example() -> Result<()> {
    // 0, ±1/2, ±1/4, ... accumulating at 0
    let cloud = two_sided_accumulating(30, 0.5)?;
    let ladder = SpectrumLadder::build(&cloud, 30)?;
    let census = epsilon_census(&ladder, 1e-4, 5)?;
    println!("census outside (-1e-4, 1e-4): {:?}", census.counts);
    println!("stabilized: {}, tail count {:?}", census.stabilized, census.tail_count());
    assert_eq!(census.tail_count(), Some(3));

    let candidates = accumulation_estimate(&ladder, DEFAULT_CLUSTER_TOL, AccumulationRule::default())?;
    for c in &candidates {
        println!(
            "accumulation candidate near {:.2e}: {} members at the top level, anomaly {}",
            c.center,
            c.members_per_level.last().unwrap(),
            c.anomaly
        );
    }
    assert!(candidates.iter().all(|c| !c.anomaly));

    let report = classify_structure(&ladder, 1e-4)?;
    println!("structure: {:?}", report.structure);
    assert_eq!(report.structure, SpectrumStructure::Mixed);

    let sphere = MetricSpace::sphere(2, 1.0)?;
    let iid = sample_cloud(&sphere, 25, &SamplerConfig::with_kind(SamplerKind::Uniform, 3))?;
    let m = SquaredDistanceMatrix::build(&iid)?;
    let worst = one_step_extensions(&m, 12)?
        .iter()
        .map(|s| s.violation())
        .fold(0.0, f64::max);
    println!("sphere ladder: worst interlacing violation {worst:.1e}");
    assert!(worst <= 1e-9);
    let finite = SpectrumLadder::finite(&m)?;
    println!("as a finite set: {:?}", classify_structure(&finite, 1e-8)?.structure);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("ladder example failed");
}
