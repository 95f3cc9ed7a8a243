//! Four distributed antennas against one aperture of the same total area.
//!
//! Emits CSV of the per-coordinate gap in dB as the total aperture grows up
//! to the antenna spread.

use nearfield_crb::crb::Numerics;
use nearfield_crb::geometry::{FieldModel, PhysicalConfig};
use nearfield_crb::repro::simo_vs_siso;
use nearfield_crb::simo::{build_layout, equivalent_siso_aperture};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = PhysicalConfig::new(0.001, 10.0)?;
    let numerics = Numerics::default().with_alpha(61 * 61);
    let (n_s, r_r, z) = (2, 30.0, 6.0);
    let d_values = [0.5, 1.0, 2.0, 3.0, 5.0, 9.0, 15.0, 20.0, 25.0, 30.0];
    println!("model,d_r_m,gap_x_db,gap_y_db,gap_z_db");
    for model in [FieldModel::Vef, FieldModel::Sef] {
        for p in simo_vs_siso(&d_values, n_s, r_r, z, &cfg, model, &numerics)? {
            let g = p.gap_db();
            println!("{},{},{:.3},{:.3},{:.3}", model.name(), p.d_r, g[0], g[1], g[2]);
        }
    }
    let layout = build_layout(n_s, r_r, 0.1, z)?;
    let d = equivalent_siso_aperture(&layout, &cfg, FieldModel::Vef, &numerics, 0)?;
    eprintln!("four antennas totalling 0.1 m locate x as well as one {d:.3} m aperture");
    Ok(())
}
