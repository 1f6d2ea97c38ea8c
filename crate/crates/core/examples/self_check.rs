//! Runs every self-check suite and prints the reports.

use sphere_tps::verify::{run, Suite};

fn main() {
    let mut ok = true;
    for suite in [Suite::Catalog, Suite::Props, Suite::Recurrence] {
        let report = run(suite);
        println!("{report}\n");
        ok &= report.passed();
    }
    std::process::exit(if ok { 0 } else { 1 });
}
