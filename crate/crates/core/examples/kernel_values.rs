//! Closed form against series for a few kernels, with series diagnostics.

use sphere_tps::{EvalMethod, KernelSpec, SeriesControl};

fn main() -> sphere_tps::Result<()> {
    println!(
        "{:>6} {:>6} {:>22} {:>22} {:>10} {:>8}",
        "(d,m)", "xi", "closed", "series", "terms", "route"
    );
    for (d, m) in [(2, 1), (3, 2), (4, 2), (7, 1)] {
        let spec = KernelSpec::new(d, m, 0)?;
        for xi in [-1.0, -0.3, 0.4, 0.9] {
            let closed = spec.with_method(EvalMethod::ClosedForm).eval(xi)?;
            let mut ctl = SeriesControl::new(1e-10);
            let series = spec
                .with_method(EvalMethod::Series)
                .eval_with(xi, &mut ctl)?;
            println!(
                "{:>6} {:>6} {:>22.15} {:>22.15} {:>10} {:>8?}",
                format!("({d},{m})"),
                xi,
                closed,
                series,
                ctl.used_terms,
                ctl.method_used.unwrap()
            );
        }
    }
    // no closed form for l > 0: the series is the only route
    let shifted = KernelSpec::new(3, 2, 1)?;
    println!("k_(3,2,1)(0.5) = {}", shifted.eval(0.5)?);
    Ok(())
}
