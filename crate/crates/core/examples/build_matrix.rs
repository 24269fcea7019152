// Squared-distance matrices as windows of Z-indexed matrices.

use distspec::sampling::sample_cloud;
use distspec::{Classification, MetricSpace, PointCloud, Result, SamplerConfig, SquaredDistanceMatrix};

pub fn run_example() -> Result<()> {
    let line = MetricSpace::real_line();
    let cloud = PointCloud::new(line, -2, vec![vec![-2.0], vec![-1.0], vec![0.0], vec![1.0], vec![2.0]])?;
    let m = SquaredDistanceMatrix::build(&cloud)?;
    println!("5 integer points, indices {}..={}", m.offset(), m.offset() + m.size() as i64 - 1);
    assert_eq!(m.classify(), Classification::HsnPlus);
    assert_eq!(m.get(-2, 2), Some(16.0));
    assert_eq!(m.max_level(), Some(2));

    let d1 = m.principal_minor(1)?;
    println!("D_1 = {:?}", (0..3).map(|i| d1.row(i).to_vec()).collect::<Vec<_>>());
    assert_eq!(d1.row(0), &[0.0, 1.0, 4.0]);

    println!("first off-diagonal stream {:?}", m.diagonal_stream(1)?);
    println!("row 0 stream {:?}", m.row_stream(0)?);
    let sums = m.row_sup_norm();
    println!("row sums {:?}, sup {}", sums.row_sums, sums.norm);
    assert_eq!(sums.norm, 30.0);

    let sphere = MetricSpace::sphere(2, 1.0)?;
    let big = SquaredDistanceMatrix::build(&sample_cloud(&sphere, 64, &SamplerConfig::default())?)?;
    let e = big.entries();
    assert!(e.is_symmetric() && (0..e.size()).all(|i| e[(i, i)] == 0.0));
    println!("64 sphere points: {:?}, row sup norm {:.4}", big.classify(), big.row_sup_norm().norm);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("matrix example failed");
}
