//! Off-axis bounds relative to the on-axis bound at the same depth, as CSV.

use nearfield_crb::crb::Numerics;
use nearfield_crb::geometry::{FieldModel, PhysicalConfig};
use nearfield_crb::repro::normalized_surface;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = PhysicalConfig::new(0.01, 10.0)?;
    let numerics = Numerics::default();
    println!("model,x_m,y_m,norm_x_db,norm_y_db,norm_z_db");
    for model in [FieldModel::Vef, FieldModel::Sef] {
        let s = normalized_surface(6.0, 3.0, &cfg, model, 10.0, 21, &numerics)?;
        let mut cells = s.db.iter();
        for &y in &s.ys {
            for &x in &s.xs {
                let d = cells.next().expect("one cell per grid point");
                println!("{},{x},{y},{:.4},{:.4},{:.4}", model.name(), d[0], d[1], d[2]);
            }
        }
        let m = s.max_db();
        eprintln!("{model}: maxima {:.2} {:.2} {:.2} dB", m[0], m[1], m[2]);
    }
    Ok(())
}
