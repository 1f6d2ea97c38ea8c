//! Exact rational constants behind the general closed forms for m = 1.

use sphere_tps::coeffs::{even_coeffs_exact, odd_coeffs_exact};

fn main() -> sphere_tps::Result<()> {
    println!("even dimensions d = 2 lambda + 2");
    for lambda in 1..=5 {
        let c = even_coeffs_exact(lambda)?;
        println!("  lambda = {lambda}  C = {}", c.cconst);
    }
    println!("odd dimensions d = 2 kappa + 1");
    for kappa in 2..=6 {
        let c = odd_coeffs_exact(kappa)?;
        println!("  kappa = {kappa}  D = {}", c.dconst);
    }
    Ok(())
}
