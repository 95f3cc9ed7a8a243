//! On-axis bounds approaching their deep near-field limits.

use nearfield_crb::cpl::{crb_asymptotic, crb_cpl, CplScenario};
use nearfield_crb::crb::Numerics;
use nearfield_crb::geometry::{FieldModel, PhysicalConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (lambda, snr, z) = (0.01, 10.0, 1.0);
    let cfg = PhysicalConfig::new(lambda, snr)?;
    let numerics = Numerics::default();
    println!("model,tau,crb_x,crb_y,crb_z,limit_x,limit_y,limit_z");
    for model in [FieldModel::Vef, FieldModel::Sef] {
        for tau in [2.0, 10.0, 100.0, 1000.0] {
            let c = crb_cpl(&CplScenario::new(tau, z, cfg, model)?, &numerics)?.crb;
            let l = crb_asymptotic(lambda, snr, tau, model)?.crb;
            println!("{},{tau},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}", model.name(), c[0], c[1], c[2], l[0], l[1], l[2]);
        }
    }
    Ok(())
}
