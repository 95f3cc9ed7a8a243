//! Runs every oracle group and prints a one-line summary for each.

use nearfield_crb::validate::run_all;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = run_all()?;
    for g in &report.groups {
        println!(
            "{:<5} {:<30} samples {:>4}  deviation {:>10.3e}  tolerance {:.0e}",
            if g.passed { "ok" } else { "FAIL" },
            g.name,
            g.samples,
            g.max_deviation,
            g.tolerance
        );
        for n in &g.notes {
            println!("      {n}");
        }
    }
    if !report.passed {
        std::process::exit(1);
    }
    Ok(())
}
