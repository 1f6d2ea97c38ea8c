//! A degree-2 spherical harmonic trend on S^2 is reproduced exactly and the kernel part vanishes.

use sphere_tps::fit::{solve_fit, FitProblem, PointSet};
use sphere_tps::{KernelSpec, TrendBasis};

fn main() -> sphere_tps::Result<()> {
    let basis = TrendBasis::new(3, 2)?;
    println!("trend {} has {} functions", basis.id(), basis.dim());
    // Fibonacci lattice
    let n = 40;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            vec![r * t.cos(), r * t.sin(), z]
        })
        .collect();
    let pts = PointSet::new(3, pts)?;
    let y: Vec<f64> = pts
        .points
        .iter()
        .map(|x| 1.0 + x[0] - 2.0 * x[1] * x[2] + 3.0 * x[2] * x[2])
        .collect();
    let model = solve_fit(&FitProblem::interpolation(
        KernelSpec::new(3, 3, 2)?,
        pts,
        y,
    ))?;
    let amax = model.a.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    println!("max |a| = {amax:.2e}");
    println!(
        "b = {:?}",
        model
            .b
            .iter()
            .map(|b| (b * 1e10).round() / 1e10)
            .collect::<Vec<_>>()
    );
    Ok(())
}
