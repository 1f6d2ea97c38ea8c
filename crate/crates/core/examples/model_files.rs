//! Writes a fitted model to JSON, reads it back and predicts from both copies.

use sphere_tps::fit::{solve_fit, FitProblem, PointSet};
use sphere_tps::io::{lonlat_to_unit, read_model, write_model};
use sphere_tps::KernelSpec;

fn main() -> sphere_tps::Result<()> {
    let sites = [
        (0.0, 0.0, 14.2),
        (90.0, 10.0, 16.8),
        (180.0, -20.0, 21.5),
        (-90.0, 45.0, 9.1),
        (30.0, -60.0, 3.3),
        (0.0, 89.0, -12.0),
    ];
    let pts = PointSet::new(
        3,
        sites
            .iter()
            .map(|&(lon, lat, _)| lonlat_to_unit(lon, lat).to_vec())
            .collect(),
    )?;
    let y: Vec<f64> = sites.iter().map(|s| s.2).collect();
    let model = solve_fit(&FitProblem::interpolation(
        KernelSpec::new(3, 2, 0)?,
        pts,
        y,
    ))?;

    let mut buf = Vec::new();
    write_model(&mut buf, &model)?;
    println!("{}", String::from_utf8_lossy(&buf));
    let back = read_model(buf.as_slice())?;

    let query = PointSet::queries(
        3,
        vec![
            lonlat_to_unit(45.0, 30.0).to_vec(),
            lonlat_to_unit(-120.0, -5.0).to_vec(),
        ],
    )?;
    println!("original: {:?}", model.evaluate(&query)?);
    println!("reloaded: {:?}", back.evaluate(&query)?);
    Ok(())
}
