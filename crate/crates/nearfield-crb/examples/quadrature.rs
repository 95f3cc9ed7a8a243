//! Adaptive tensor Gauss-Legendre integration on rectangles.
//!
//! Integrates a smooth and an oscillatory integrand with known values and
//! compares the result with a midpoint Riemann grid.

use nearfield_crb::quadrature::{integrate_2d, riemann_grid_rect, QuadratureSpec, RectDomain, Rule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dom = RectDomain::centered(1.0)?;
    let spec = QuadratureSpec::default();

    let smooth = integrate_2d(|u, v| 1.0 / (1.0 + u * u + v * v).powf(1.5), &dom, &spec)?;
    let exact = 4.0 * (1.0f64 / 3f64.sqrt()).atan();
    println!("smooth: {:.15} exact {:.15} panels {} converged {}", smooth.value, exact, smooth.panels, smooth.converged);

    let k = 60.0;
    let osc = integrate_2d(|u, v| (k * u).cos() * (k * v).cos(), &dom, &spec)?;
    let exact = (2.0 * k.sin() / k).powi(2);
    println!("oscillatory: {:.3e} exact {:.3e} panels {}", osc.value, exact, osc.panels);

    let coarse = QuadratureSpec { rule: Rule::TensorGauss { order: 8 }, panels: 1, ..spec };
    let c = integrate_2d(|u, v| (k * u).cos() * (k * v).cos(), &dom, &coarse)?;
    println!("order 8 from one panel: {:.3e} after {} panels", c.value, c.panels);

    for alpha in [11 * 11, 101 * 101, 1001 * 1001] {
        let g = riemann_grid_rect(&dom, alpha)?;
        let mut sum = 0.0;
        for &x in &g.xs {
            for &y in &g.ys {
                sum += (k * x).cos() * (k * y).cos();
            }
        }
        println!("riemann {alpha:>7} cells: {:.3e}", sum * g.cell_area);
    }
    Ok(())
}
