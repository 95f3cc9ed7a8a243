//! Reproduces the RCRB comparison table for the three observation types.
//!
//! Run with `cargo run --release --example table1`.

use std::time::Instant;

use nearfield_crb::crb::Numerics;
use nearfield_crb::repro::table1;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let start = Instant::now();
    let table = table1(&Numerics::default())?;
    print!("{}", table.render_text());
    println!();
    for row in table.rows.iter().filter(|r| r.gated) {
        let worst = row.rel_errors().iter().flatten().fold(0.0f64, |a, &b| a.max(b));
        println!("{} {}: worst relative deviation {:.2}%", row.model, row.coordinate, 100.0 * worst);
    }
    println!("elapsed {:.2} s", start.elapsed().as_secs_f64());
    Ok(())
}
