// Seeded point clouds: every sampler kind, reproducibility and CSV round trip.

use distspec::io::{cloud_csv, parse_cloud_csv};
use distspec::sampling::{accumulating_sequence, sample_cloud, sample_cloud_stream};
use distspec::{MetricSpace, Result, SamplerConfig, SamplerKind};

pub fn run_example() -> Result<()> {
    let space = MetricSpace::minkowski(3, 2.0)?;
    let config = SamplerConfig::with_kind(SamplerKind::Mixture, 42);
    let cloud = sample_cloud(&space, 100, &config)?;
    let again = sample_cloud(&space, 100, &config)?;
    assert_eq!(cloud.content_hash(), again.content_hash());
    let other = sample_cloud_stream(&space, 100, &config, 1)?;
    assert_ne!(cloud.content_hash(), other.content_hash());
    println!(
        "mixture cloud: {} points, indices {}..={}, hash {}",
        cloud.len(),
        cloud.index_of(0),
        cloud.index_of(cloud.len() - 1),
        &cloud.content_hash()[..16]
    );

    let sphere = MetricSpace::sphere(2, 2.0)?;
    let on_sphere = sample_cloud(&sphere, 5, &SamplerConfig::with_kind(SamplerKind::Uniform, 1))?;
    for p in on_sphere.points() {
        let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((r - 2.0).abs() < 1e-12);
    }
    let grid = sample_cloud(&MetricSpace::sphere(1, 1.0)?, 6, &SamplerConfig::with_kind(SamplerKind::Grid, 0))?;
    println!("six equally spaced points on the circle, diameter {:.6}", grid.diameter()?);

    let acc = accumulating_sequence(10, 0.5)?;
    let first: Vec<f64> = acc.points().iter().take(4).map(|p| p[0]).collect();
    println!("accumulating sequence starts {first:?}, first index {}", acc.offset());
    assert_eq!(first, vec![0.5, 0.25, 0.125, 0.0625]);

    let text = cloud_csv(&on_sphere);
    let back = parse_cloud_csv(&text, &sphere)?;
    assert_eq!(back.content_hash(), on_sphere.content_hash());
    print!("{text}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("sampling example failed");
}
