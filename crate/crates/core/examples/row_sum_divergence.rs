// Max row sums of squared-distance matrices grow linearly with the number of
// points on a bounded space.

use distspec::experiments::{divergence_probe, DivergenceConfig};
use distspec::Result;

pub fn run_example() -> Result<()> {
    let config = DivergenceConfig {
        sizes: vec![100, 200, 400],
        seeds: vec![0, 1, 2],
        ..Default::default()
    };
    let table = divergence_probe(&config)?;
    for row in &table.rows {
        println!(
            "size {:4}: mean max row sum {:8.2}, per point {:.4} (spread {:.4}..{:.4})",
            row.size, row.mean_max_row_sum, row.mean_normalized, row.min_normalized, row.max_normalized
        );
        assert!(row.min_normalized > 0.0);
    }
    println!("doubling ratios {:.3?}", table.mean_ratios());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("divergence example failed");
}
