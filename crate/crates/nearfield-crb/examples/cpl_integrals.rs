//! The six on-axis integrals per model, with closed forms and disk bounds.

use nearfield_crb::cpl::{rho_numeric, ClosedFormStatus};
use nearfield_crb::geometry::FieldModel;
use nearfield_crb::quadrature::QuadratureSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let quad = QuadratureSpec::default();
    for model in [FieldModel::Vef, FieldModel::Sef] {
        println!("{model}");
        println!("{:>6} {:>8} {:>14} {:>14} {:>14} {:>10}", "tau", "entry", "quadrature", "lower", "upper", "closed");
        for tau in [0.1, 1.0, 10.0] {
            for (name, e) in rho_numeric(tau, model, &quad)?.entries() {
                let (lo, hi) = e.bounds.map_or(("-".into(), "-".into()), |(l, h)| (format!("{l:.8}"), format!("{h:.8}")));
                let closed = match e.closed_form {
                    Some(c) if c.status == ClosedFormStatus::Agrees => format!("{:.1e}", c.rel_diff),
                    Some(_) => "mismatch".into(),
                    None => "-".into(),
                };
                println!("{tau:>6} {name:>8} {:>14.8} {lo:>14} {hi:>14} {closed:>10}", e.value);
            }
        }
    }
    Ok(())
}
