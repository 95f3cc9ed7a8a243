use nearfield_crb::crb::Numerics;
use nearfield_crb::geometry::{FieldModel, PhysicalConfig};
use nearfield_crb::repro::{depth_profile, linspace};

/// Bounds along the line x = 2 m, y = 3 m in front of a 9 m surface.
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = PhysicalConfig::new(0.01, 10.0)?;
    let depths = linspace(0.5, 30.0, 60);
    let numerics = Numerics::default();
    let v = depth_profile(2.0, 3.0, &depths, 9.0, &cfg, FieldModel::Vef, &numerics)?;
    let s = depth_profile(2.0, 3.0, &depths, 9.0, &cfg, FieldModel::Sef, &numerics)?;
    println!("z_m,vef_x,vef_y,vef_z,sef_x,sef_y,sef_z");
    for (z, (a, b)) in depths.iter().zip(v.iter().zip(&s)) {
        println!("{z:.3},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}", a[0], a[1], a[2], b[0], b[1], b[2]);
    }
    Ok(())
}
