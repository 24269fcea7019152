// Positive and negative eigenvalue counts as clouds grow, for several L^p
// metrics, plus the SVG chart.

use distspec::cli::growth_series;
use distspec::experiments::{inertia_growth, GrowthConfig};
use distspec::io::growth_csv;
use distspec::svg::emit_svg;
use distspec::Result;

pub fn run_example() -> Result<()> {
    let config = GrowthConfig {
        p_values: vec![1.0, 2.0, 4.0],
        sizes: (10..=60).step_by(10).collect(),
        seeds: vec![0, 1, 2],
        ..Default::default()
    };
    let curves = inertia_growth(&config)?;
    for curve in &curves {
        let line: Vec<String> = curve
            .points
            .iter()
            .map(|pt| format!("{}:{:.1}/{:.1}", pt.size, pt.mean_plus, pt.mean_minus))
            .collect();
        println!("p = {}: size:n+/n-  {}", curve.p, line.join("  "));
    }
    assert!(curves[1].points.iter().all(|pt| pt.max_plus == 1));

    let dir = std::env::temp_dir().join("distspec-growth-example");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("growth.csv"), growth_csv(&curves))?;
    emit_svg(&growth_series(&curves, false), "Inertia growth", "size", "mean count", &dir.join("growth.svg"))?;
    println!("wrote {}", dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("growth example failed");
}
