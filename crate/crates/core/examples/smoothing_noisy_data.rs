//! Penalized least squares on noisy data: larger mu trades data fit for a smaller energy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphere_tps::fit::{solve_fit_with_report, FitProblem, PointSet};
use sphere_tps::KernelSpec;

fn main() -> sphere_tps::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 120;
    // points on the circle S^1 at random angles
    let angles: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    let pts = PointSet::new(2, angles.iter().map(|t| vec![t.cos(), t.sin()]).collect())?;
    let clean: Vec<f64> = angles.iter().map(|t| (3.0 * t).cos()).collect();
    let y: Vec<f64> = clean.iter().map(|c| c + rng.gen_range(-0.3..0.3)).collect();
    let spec = KernelSpec::new(2, 2, 0)?;
    println!(
        "{:>8} {:>14} {:>14} {:>14}",
        "mu", "energy", "rms to data", "rms to truth"
    );
    for mu in [1e-6, 1e-4, 1e-2, 1.0] {
        let (model, rep) =
            solve_fit_with_report(&FitProblem::smoothing(spec, pts.clone(), y.clone(), mu, n))?;
        let s = model.evaluate(&pts)?;
        let rms = |t: &[f64]| {
            (s.iter().zip(t).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n as f64).sqrt()
        };
        println!(
            "{mu:>8.0e} {:>14.6e} {:>14.6} {:>14.6}",
            rep.energy,
            rms(&y),
            rms(&clean)
        );
    }
    Ok(())
}
