//! Builds k_{d,1}, ..., k_{d,m} from the integral operator and compares with the closed forms.

use sphere_tps::kernel::k_closed;
use sphere_tps::operator::KernelRecurrence;

fn main() -> sphere_tps::Result<()> {
    for (d, m) in [(3, 3), (4, 2), (6, 1)] {
        let rec = KernelRecurrence::new(d, m)?;
        println!("d = {d}");
        for j in 1..=m {
            let mut worst: f64 = 0.0;
            for i in 0..=18 {
                let x = -0.9 + 0.1 * i as f64;
                worst = worst.max((rec.eval(j, x)? - k_closed(d, j, x)?).abs());
            }
            println!(
                "  m = {j}: max |recurrence - closed| = {worst:.2e}, mean = {:.1e}",
                rec.mean(j)?
            );
        }
    }
    Ok(())
}
