// Distances and diameter bounds in each supported space.

use distspec::{MetricSpace, Result};

pub fn run_example() -> Result<()> {
    let l1 = MetricSpace::minkowski(3, 1.0)?;
    let l2 = MetricSpace::minkowski(3, 2.0)?;
    let l4 = MetricSpace::minkowski(3, 4.0)?;
    let (x, y) = ([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]);
    let d1 = l1.distance(&x, &y)?;
    let d2 = l2.distance(&x, &y)?;
    let d4 = l4.distance(&x, &y)?;
    println!("{}: {d1}   {}: {d2:.6}   {}: {d4:.6}", l1.label(), l2.label(), l4.label());
    assert_eq!(d1, 3.0);
    assert!((d2 - 3f64.sqrt()).abs() < 1e-15);
    assert!(d1 >= d2 && d2 >= d4);

    let sphere = MetricSpace::sphere(2, 1.0)?;
    let antipodal = sphere.distance(&[0.0, 0.0, 1.0], &[0.0, 0.0, -1.0])?;
    println!("{}: north to south pole {antipodal:.6}, diameter bound {:.6}", sphere.label(), sphere.diameter_bound());
    assert!((antipodal - std::f64::consts::PI).abs() < 1e-15);

    let torus = MetricSpace::flat_torus(vec![1.0, 1.0])?;
    let wrapped = torus.distance(&[0.05, 0.0], &[0.95, 0.0])?;
    println!("{}: wrap-around distance {wrapped:.6}, diameter bound {:.6}", torus.label(), torus.diameter_bound());
    assert!((wrapped - 0.1).abs() < 1e-12);

    let line = MetricSpace::real_line();
    println!("{}: bounded = {}", line.label(), line.is_bounded());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("metric example failed");
}
