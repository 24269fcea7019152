// Inverse problem: find points on the line whose squared-distance spectrum
// matches a prescribed trace-zero sequence (4, -3.6, -0.4, 0, 0, ...).
// Points on a line give at most three nonzero eigenvalues: one positive and
// two negative.

use distspec::sampling::Stream;
use distspec::spectral::eigenvalues;
use distspec::{MetricSpace, PointCloud, Result, SquaredDistanceMatrix};

const POINTS: usize = 6;

fn spectrum(xs: &[f64]) -> Result<Vec<f64>> {
    let cloud = PointCloud::new(MetricSpace::real_line(), 0, xs.iter().map(|x| vec![*x]).collect())?;
    eigenvalues(SquaredDistanceMatrix::build(&cloud)?.entries())
}

fn misfit(xs: &[f64], target: &[f64]) -> f64 {
    match spectrum(xs) {
        Ok(v) => v.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum(),
        Err(_) => f64::INFINITY,
    }
}

/// Compass search: try +-step along each coordinate, halve the step when
/// nothing improves.
fn compass(mut xs: Vec<f64>, target: &[f64]) -> Vec<f64> {
    let mut best = misfit(&xs, target);
    let mut step = 0.5;
    while step > 1e-12 {
        let mut improved = false;
        for i in 1..xs.len() {
            for dir in [1.0, -1.0] {
                let mut trial = xs.clone();
                trial[i] += dir * step;
                let f = misfit(&trial, target);
                if f < best {
                    (xs, best, improved) = (trial, f, true);
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    xs
}

pub fn run_example() -> Result<()> {
    let mut target = vec![0.0; POINTS];
    target[0] = -3.6;
    target[1] = -0.4;
    target[POINTS - 1] = 4.0;
    let mut rng = Stream::new(11, 0);
    for attempt in 0..20 {
        // the first point stays at 0 to fix the translation
        let start: Vec<f64> = (0..POINTS).map(|i| if i == 0 { 0.0 } else { rng.normal() }).collect();
        let xs = compass(start, &target);
        let got = spectrum(&xs)?;
        let err = got.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if err <= 1e-3 {
            println!("attempt {attempt}: points {xs:.6?}");
            println!("spectrum {got:.6?}, max error {err:.1e}");
            return Ok(());
        }
    }
    Err(distspec::Error::Numeric("no configuration within 1e-3 of the target".into()))
}

#[allow(dead_code)]
fn main() {
    run_example().expect("search example failed");
}
