//! Field observed on the surface for a terminal in front of it.
//!
//! Prints the vector field, the scalar field and the overall scalar field
//! along a line across the aperture, plus the Green-function variants at one
//! point.

use nearfield_crb::fields::{osef, sef, tensor_green, vef, GreenVariant};
use nearfield_crb::geometry::{PhysicalConfig, SurfacePoint, SurfaceGeometry, TerminalPosition};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = PhysicalConfig::new(0.01, 10.0)?;
    let terminal = TerminalPosition::new(0.5, -0.25, 2.0)?;

    println!("u_m,|Ex|,|Ey|,|Ez|,|sef|,arg_sef_rad");
    for i in 0..=10 {
        let u = -1.0 + 0.2 * i as f64;
        let p = SurfacePoint::new(u, 0.0);
        let e = vef(p, &terminal, &cfg)?;
        let s = sef(p, &terminal, &cfg)?;
        println!("{u:.1},{:.6e},{:.6e},{:.6e},{:.6e},{:.4}", e.x.norm(), e.y.norm(), e.z.norm(), s.norm(), s.arg());
    }

    let r = [0.3, -0.2, 2.0];
    for variant in [GreenVariant::ExactTensor, GreenVariant::RadiativeTensor] {
        let g = tensor_green(r, variant, &cfg)?;
        println!("{variant:?}: G_yy = {:.6e}", g[1][1]);
    }

    let geom = SurfaceGeometry::new(2.0)?;
    for alpha in [21 * 21, 101 * 101, 201 * 201] {
        let o = osef(&terminal, &geom, &cfg, alpha)?;
        println!("overall scalar field, {alpha} cells: {:.8e} {:+.8e}i", o.re, o.im);
    }
    Ok(())
}
