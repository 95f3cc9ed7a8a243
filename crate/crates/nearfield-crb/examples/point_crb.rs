//! Bounds at an off-axis terminal for every observation model.

use nearfield_crb::crb::{crb_point, Numerics};
use nearfield_crb::geometry::{regime_classify, FieldModel, PhysicalConfig, RegimeDistances, SurfaceGeometry, TerminalPosition};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = PhysicalConfig::new(0.01, 10.0)?;
    let geom = SurfaceGeometry::new(3.0)?;
    let terminal = TerminalPosition::new(1.0, 2.0, 6.0)?;
    let d = RegimeDistances::new(&geom, &cfg);
    println!(
        "r = {:.3} m, regime {}, fresnel {:.2} m, fraunhofer {:.0} m",
        terminal.r_to(),
        regime_classify(terminal.r_to(), &geom, &cfg)?.name(),
        d.fresnel,
        d.fraunhofer
    );
    let numerics = Numerics::default();
    for model in FieldModel::ALL {
        let r = crb_point(&terminal, &geom, &cfg, model, &numerics)?;
        let c = r.rcrb_cm();
        println!("{:<4} rcrb x {:>10.4} cm  y {:>10.4} cm  z {:>10.4} cm  ({:?})", model.name(), c[0], c[1], c[2], r.path);
    }
    Ok(())
}
