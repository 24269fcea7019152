// Eigenvalues, inertia, trace and Gershgorin diagnostics, and the Perron pair.

use distspec::sampling::sample_cloud;
use distspec::spectral::{eigensystem, gershgorin_bound, inertia_auto, perron, trace_defect};
use distspec::{DenseMatrix, MetricSpace, Result, SamplerConfig, SquaredDistanceMatrix};

pub fn run_example() -> Result<()> {
    let collinear = DenseMatrix::from_rows(&[[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]])?;
    let sys = eigensystem(&collinear, true)?;
    println!("collinear points 0, 1, 2: eigenvalues {:?}", sys.values);
    let six = 6f64.sqrt();
    for (got, want) in sys.values.iter().zip([-4.0, 2.0 - six, 2.0 + six]) {
        assert!((got - want).abs() < 1e-12);
    }
    println!("residual {:.1e}, trace defect {:.1e}", sys.residual.unwrap_or(0.0), trace_defect(&sys.values));

    for p in [1.0, 2.0, 4.0] {
        let space = MetricSpace::minkowski(3, p)?;
        let cloud = sample_cloud(&space, 40, &SamplerConfig::default())?;
        let m = SquaredDistanceMatrix::build(&cloud)?;
        let sys = eigensystem(m.entries(), false)?;
        let inertia = inertia_auto(&sys.values);
        let pp = perron(m.entries())?;
        let radius = sys.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        println!(
            "L^{p}, 40 points: (n+, n0, n-) = ({}, {}, {}), Perron {:.4} (gap {:.4}, positive vector {}), max|lambda| {:.4} <= {:.4}",
            inertia.n_plus,
            inertia.n_zero,
            inertia.n_minus,
            pp.value,
            pp.spectral_gap,
            pp.is_positive(),
            radius,
            gershgorin_bound(m.entries())
        );
        assert!(radius <= gershgorin_bound(m.entries()));
        if p == 2.0 {
            assert_eq!(inertia.n_plus, 1);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("spectrum example failed");
}
