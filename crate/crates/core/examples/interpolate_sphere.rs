//! Interpolates a smooth function sampled at scattered points on S^2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphere_tps::fit::{solve_fit_with_report, FitProblem, PointSet};
use sphere_tps::KernelSpec;

fn target(x: &[f64]) -> f64 {
    (2.0 * x[0]).sin() + x[1] * x[2] + 0.5 * x[2] * x[2]
}

fn unit(rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.iter().map(|c| c / n).collect();
        }
    }
}

fn main() -> sphere_tps::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let test = PointSet::queries(3, (0..500).map(|_| unit(&mut rng)).collect())?;
    for n in [25, 100, 400] {
        let pts = PointSet::new(3, (0..n).map(|_| unit(&mut rng)).collect())?;
        let y: Vec<f64> = pts.points.iter().map(|x| target(x)).collect();
        for m in [2, 3] {
            let (model, rep) = solve_fit_with_report(&FitProblem::interpolation(
                KernelSpec::new(3, m, 0)?,
                pts.clone(),
                y.clone(),
            ))?;
            let pred = model.evaluate(&test)?;
            let err = test
                .points
                .iter()
                .zip(&pred)
                .map(|(x, s)| (s - target(x)).abs())
                .fold(0.0, f64::max);
            println!("n = {n:>3}, m = {m}: residual at data {:.1e}, max error on 500 test points {err:.3e}", rep.interpolation_residual);
        }
    }
    Ok(())
}
