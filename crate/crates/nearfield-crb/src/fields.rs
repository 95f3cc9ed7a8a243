//! Electromagnetic propagation model of a $+Y$ Hertzian dipole seen by a
//! planar receiver at $z = 0$.
//!
//! With $x = x_r - x_t$, $y = y_r - y_t$, $z = z_t$ and
//! $r = \sqrt{x^2 + y^2 + z^2}$ the observed fields are
//!
//! $$e_x = jE\,\frac{xy}{r^3}e^{-jk_0r},\quad
//!   e_y = -jE\Big(\frac1r - \frac{y^2}{r^3}\Big)e^{-jk_0r},\quad
//!   e_z = -jE\,\frac{zy}{r^3}e^{-jk_0r}$$
//!
//! and the scalar field $e^s = E\sqrt{z(x^2 + z^2)}\,r^{-5/2}e^{-jk_0r}$.
//! Gradients are taken with respect to the terminal coordinates.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{CrbError, Result};
use crate::geometry::{PhysicalConfig, SurfaceGeometry, SurfacePoint, TerminalPosition};
use crate::quadrature::{riemann_grid, riemann_grid_rect, RectDomain};

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub type Matrix3c = [[Complex64; 3]; 3];

/// Cartesian components of a complex field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexField3 {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

impl ComplexField3 {
    pub fn as_array(&self) -> [Complex64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x.norm_sqr() + self.y.norm_sqr() + self.z.norm_sqr()
    }
}

/// $+Y$ Hertzian dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleSource {
    pub current: f64,
    pub length: f64,
}

impl DipoleSource {
    pub const ORIENTATION: [f64; 3] = [0.0, 1.0, 0.0];

    /// $E_{in} = \eta I_{in} l_t / (2\lambda)$.
    pub fn e_in(&self, cfg: &PhysicalConfig) -> f64 {
        cfg.impedance() * self.current * self.length / (2.0 * cfg.wavelength())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenVariant {
    ExactTensor,
    RadiativeTensor,
    Fresnel,
    PlaneWave,
}

fn expj(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

/// $G_s(r) = -j\eta e^{-jk_0 r}/(2\lambda r)$.
pub fn scalar_green(r: f64, cfg: &PhysicalConfig) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(CrbError::domain(format!("distance must be positive, got {r}")));
    }
    Ok(-J * cfg.impedance() / (2.0 * cfg.wavelength() * r) * expj(-cfg.wave_number() * r))
}

/// Dyadic Green function for a separation vector.
///
/// Only the tensor variants are meaningful here; the scalar approximations
/// are available through [`green_fresnel`] and [`green_planewave`].
pub fn tensor_green(r_vec: [f64; 3], variant: GreenVariant, cfg: &PhysicalConfig) -> Result<Matrix3c> {
    let r = (r_vec[0] * r_vec[0] + r_vec[1] * r_vec[1] + r_vec[2] * r_vec[2]).sqrt();
    if !(r > 0.0) {
        return Err(CrbError::domain("zero separation vector"));
    }
    let rh = [r_vec[0] / r, r_vec[1] / r, r_vec[2] / r];
    let gs = scalar_green(r, cfg)?;
    let (a, b) = match variant {
        GreenVariant::ExactTensor => {
            let kr = cfg.wave_number() * r;
            (
                Complex64::new(1.0 - 1.0 / (kr * kr), 1.0 / kr),
                Complex64::new(1.0 - 3.0 / (kr * kr), 3.0 / kr),
            )
        }
        GreenVariant::RadiativeTensor => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        GreenVariant::Fresnel | GreenVariant::PlaneWave => {
            return Err(CrbError::Unsupported("scalar approximations have no tensor form".into()))
        }
    };
    let mut g = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (i, row) in g.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            let id = if i == k { 1.0 } else { 0.0 };
            *cell = gs * (a * id - b * rh[i] * rh[k]);
        }
    }
    Ok(g)
}

/// Near-field factors $(1 + j/(k_0r) - 1/(k_0r)^2,\ 1 + 3j/(k_0r) - 3/(k_0r)^2)$.
pub fn exact_tensor_factors(r: f64, cfg: &PhysicalConfig) -> (Complex64, Complex64) {
    let kr = cfg.wave_number() * r;
    (
        Complex64::new(1.0 - 1.0 / (kr * kr), 1.0 / kr),
        Complex64::new(1.0 - 3.0 / (kr * kr), 3.0 / kr),
    )
}

fn approx_prefactor(r_to: f64, cfg: &PhysicalConfig) -> Complex64 {
    -J * cfg.wave_number() * cfg.impedance() / (4.0 * PI * r_to)
}

/// Second-order (Fresnel) expansion of $G_s$ about the aperture centre.
pub fn green_fresnel(p_r: SurfacePoint, p_t: &TerminalPosition, cfg: &PhysicalConfig) -> Result<Complex64> {
    let r_to = p_t.r_to();
    let [psi, omega, _] = p_t.direction_cosines();
    let lin = p_r.x * psi + p_r.y * omega;
    let quad = (p_r.x * p_r.x + p_r.y * p_r.y - lin * lin) / (2.0 * r_to);
    Ok(approx_prefactor(r_to, cfg) * expj(-cfg.wave_number() * (r_to - lin + quad)))
}

/// Linear-phase (plane-wave) approximation of $G_s$.
pub fn green_planewave(p_r: SurfacePoint, p_t: &TerminalPosition, cfg: &PhysicalConfig) -> Result<Complex64> {
    let r_to = p_t.r_to();
    let [psi, omega, _] = p_t.direction_cosines();
    let lin = p_r.x * psi + p_r.y * omega;
    Ok(approx_prefactor(r_to, cfg) * expj(-cfg.wave_number() * r_to) * expj(cfg.wave_number() * lin))
}

fn relative(p_r: SurfacePoint, p_t: &TerminalPosition) -> Result<(f64, f64, f64)> {
    let (x, y, z) = (p_r.x - p_t.x, p_r.y - p_t.y, p_t.z);
    if x == 0.0 && y == 0.0 && z == 0.0 {
        return Err(CrbError::domain("surface point coincides with the terminal"));
    }
    Ok((x, y, z))
}

pub(crate) fn vef_rel(x: f64, y: f64, z: f64, k: f64) -> [Complex64; 3] {
    let r2 = x * x + y * y + z * z;
    let r = r2.sqrt();
    let r3 = r2 * r;
    let e = expj(-k * r);
    [
        J * (x * y / r3) * e,
        -J * (1.0 / r - y * y / r3) * e,
        -J * (z * y / r3) * e,
    ]
}

/// Rows are field components, columns the terminal coordinates.
pub(crate) fn vef_grad_rel(x: f64, y: f64, z: f64, k: f64) -> Matrix3c {
    let r2 = x * x + y * y + z * z;
    let r = r2.sqrt();
    let r3 = r2 * r;
    let r4 = r2 * r2;
    let r5 = r4 * r;
    let e = expj(-k * r);
    let c = |re: f64, im: f64| Complex64::new(re, im) * e;
    let yy = y * y;
    [
        [
            c(-k * x * x * y / r4, 3.0 * x * x * y / r5 - y / r3),
            c(-k * x * yy / r4, 3.0 * x * yy / r5 - x / r3),
            c(k * x * y * z / r4, -3.0 * x * y * z / r5),
        ],
        [
            c(-k * x * (yy - r2) / r4, x * (3.0 * yy - r2) / r5),
            c(-k * y * (yy - r2) / r4, y * (3.0 * yy - 3.0 * r2) / r5),
            c(k * z * (yy - r2) / r4, z * (r2 - 3.0 * yy) / r5),
        ],
        [
            c(k * x * y * z / r4, -3.0 * x * y * z / r5),
            c(k * yy * z / r4, z / r3 - 3.0 * yy * z / r5),
            c(-k * y * z * z / r4, 3.0 * y * z * z / r5 - y / r3),
        ],
    ]
}

pub(crate) fn sef_rel(x: f64, y: f64, z: f64, k: f64) -> Complex64 {
    let r = (x * x + y * y + z * z).sqrt();
    (z * (x * x + z * z)).sqrt() / r.powf(2.5) * expj(-k * r)
}

pub(crate) fn sef_grad_rel(x: f64, y: f64, z: f64, k: f64) -> [Complex64; 3] {
    let r = (x * x + y * y + z * z).sqrt();
    let fxz = x * x + z * z;
    let fez = (z * fxz).sqrt() * expj(-k * r);
    let r52 = r.powf(-2.5);
    let r72 = r52 / r;
    let r92 = r72 / r;
    [
        Complex64::new(x * (2.5 * r92 - r52 / fxz), x * k * r72) * fez,
        Complex64::new(y * 2.5 * r92, y * k * r72) * fez,
        Complex64::new((3.0 * z * z + x * x) / (2.0 * z * fxz) * r52 - 2.5 * z * r92, -k * z * r72) * fez,
    ]
}

/// Vector electric field observed at `p_r`.
pub fn vef(p_r: SurfacePoint, p_t: &TerminalPosition, cfg: &PhysicalConfig) -> Result<ComplexField3> {
    let (x, y, z) = relative(p_r, p_t)?;
    let [ex, ey, ez] = vef_rel(x, y, z, cfg.wave_number());
    let e = cfg.e_in();
    Ok(ComplexField3 { x: ex * e, y: ey * e, z: ez * e })
}

/// Scalar electric field (normal Poynting projection with propagation phase).
pub fn sef(p_r: SurfacePoint, p_t: &TerminalPosition, cfg: &PhysicalConfig) -> Result<Complex64> {
    if !(p_t.z > 0.0) {
        return Err(CrbError::domain("scalar field requires z_t > 0"));
    }
    let (x, y, z) = relative(p_r, p_t)?;
    Ok(sef_rel(x, y, z, cfg.wave_number()) * cfg.e_in())
}

/// $\partial e_\kappa / \partial \xi_n$; entry `[kappa][n]`.
pub fn vef_gradient(p_r: SurfacePoint, p_t: &TerminalPosition, cfg: &PhysicalConfig) -> Result<Matrix3c> {
    let (x, y, z) = relative(p_r, p_t)?;
    let mut g = vef_grad_rel(x, y, z, cfg.wave_number());
    for row in g.iter_mut() {
        for c in row.iter_mut() {
            *c *= cfg.e_in();
        }
    }
    Ok(g)
}

/// $\partial e^s / \partial \xi_n$.
pub fn sef_gradient(p_r: SurfacePoint, p_t: &TerminalPosition, cfg: &PhysicalConfig) -> Result<[Complex64; 3]> {
    if !(p_t.z > 0.0) {
        return Err(CrbError::domain("scalar field requires z_t > 0"));
    }
    let (x, y, z) = relative(p_r, p_t)?;
    Ok(sef_grad_rel(x, y, z, cfg.wave_number()).map(|c| c * cfg.e_in()))
}

/// $\sqrt{2/D_r^2}$.
pub fn osef_normalisation(geom: &SurfaceGeometry) -> f64 {
    2f64.sqrt() / geom.diagonal()
}

/// Overall scalar field $\sqrt{2/D_r^2}\,\sum_{ij} e^s(x_i, y_j)\,\Delta A$ on the Riemann grid.
pub fn osef(p_t: &TerminalPosition, geom: &SurfaceGeometry, cfg: &PhysicalConfig, alpha: usize) -> Result<Complex64> {
    let grid = riemann_grid(geom, alpha)?;
    let k = cfg.wave_number();
    let mut acc = Complex64::new(0.0, 0.0);
    for &yr in &grid.ys {
        for &xr in &grid.xs {
            acc += sef_rel(xr - p_t.x, yr - p_t.y, p_t.z, k);
        }
    }
    Ok(acc * osef_normalisation(geom) * grid.cell_area * cfg.e_in())
}

/// Gradient of [`osef`] with respect to the terminal coordinates.
pub fn osef_gradient(
    p_t: &TerminalPosition,
    geom: &SurfaceGeometry,
    cfg: &PhysicalConfig,
    alpha: usize,
) -> Result<[Complex64; 3]> {
    osef_gradient_on(p_t, &RectDomain::aperture(geom), osef_normalisation(geom), cfg, alpha)
}

/// Riemann-summed scalar-field gradient over one rectangle, scaled by
/// `normalisation * cell_area * E_in`.
pub fn osef_gradient_on(
    p_t: &TerminalPosition,
    dom: &RectDomain,
    normalisation: f64,
    cfg: &PhysicalConfig,
    alpha: usize,
) -> Result<[Complex64; 3]> {
    let grid = riemann_grid_rect(dom, alpha)?;
    let k = cfg.wave_number();
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for &yr in &grid.ys {
        for &xr in &grid.xs {
            let g = sef_grad_rel(xr - p_t.x, yr - p_t.y, p_t.z, k);
            for (a, gi) in acc.iter_mut().zip(g) {
                *a += gi;
            }
        }
    }
    if acc.iter().any(|a| !a.is_finite()) {
        return Err(CrbError::Numerical { message: "overall scalar field gradient is not finite".into(), location: None });
    }
    let s = normalisation * grid.cell_area * cfg.e_in();
    Ok(acc.map(|a| a * s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::to_local_spherical;
    use proptest::prelude::*;

    fn cfg() -> PhysicalConfig {
        PhysicalConfig::new(0.01, 10.0).unwrap()
    }

    #[test]
    fn scalar_green_examples() {
        let c = cfg();
        let g = scalar_green(0.01, &c).unwrap();
        let expect = -c.impedance() / (2.0 * 0.01 * 0.01);
        assert!((g.im - expect).abs() < 1e-9 * expect.abs() && g.re.abs() < 1e-9 * expect.abs());
        assert!((scalar_green(2.0, &c).unwrap().norm() - 9418.25).abs() < 1e-9);
        let ratio = scalar_green(3.0, &c).unwrap().norm() / scalar_green(6.0, &c).unwrap().norm();
        assert!((ratio - 2.0).abs() < 1e-14);
        assert!(scalar_green(0.0, &c).is_err());
    }

    #[test]
    fn footnote_factors_at_one_wavelength() {
        let c = cfg();
        let (a, b) = exact_tensor_factors(c.wavelength(), &c);
        assert!((a.norm_sqr() - 0.975).abs() < 1e-3);
        assert!((b.norm_sqr() - 1.082).abs() < 1e-3);
    }

    #[test]
    fn radiative_tensor_projects_out_axis() {
        let g = tensor_green([0.0, 0.0, 2.0], GreenVariant::RadiativeTensor, &cfg()).unwrap();
        assert_eq!(g[2][2], Complex64::new(0.0, 0.0));
        assert!(g[0][0].norm() > 0.0);
        assert!(tensor_green([0.0; 3], GreenVariant::ExactTensor, &cfg()).is_err());
    }

    #[test]
    fn exact_and_radiative_tensors_converge() {
        let c = cfg();
        for kr in [100.0, 1e4] {
            let r = kr / c.wave_number();
            let v = [r * 0.6, 0.0, r * 0.8];
            let ex = tensor_green(v, GreenVariant::ExactTensor, &c).unwrap();
            let ra = tensor_green(v, GreenVariant::RadiativeTensor, &c).unwrap();
            let gs = scalar_green(r, &c).unwrap().norm();
            let bound = (3.0 / kr + 3.0 / (kr * kr)) * gs;
            let mut worst: f64 = 0.0;
            for i in 0..3 {
                for k in 0..3 {
                    worst = worst.max((ex[i][k] - ra[i][k]).norm());
                }
            }
            assert!(worst <= bound, "kr={kr}");
            if kr >= 1e4 {
                assert!(worst <= 1e-3 * gs);
            }
        }
    }

    #[test]
    fn radiative_tensor_matches_dipole_field() {
        let c = cfg().with_dipole(1.0, 0.002).unwrap();
        let p_t = TerminalPosition::new(0.3, -0.2, 1.7).unwrap();
        let p_r = SurfacePoint::new(0.9, 0.4);
        let rv = [p_r.x - p_t.x, p_r.y - p_t.y, -p_t.z];
        let g = tensor_green(rv, GreenVariant::RadiativeTensor, &c).unwrap();
        let f = vef(p_r, &p_t, &c).unwrap().as_array();
        for i in 0..3 {
            let via_tensor = g[i][1] * 0.002;
            assert!((via_tensor - f[i]).norm() < 1e-12 * f[1].norm(), "{i}");
        }
    }

    #[test]
    fn vef_examples() {
        let c = cfg();
        let f = vef(SurfacePoint::new(0.0, 0.0), &TerminalPosition::on_cpl(4.0).unwrap(), &c).unwrap();
        assert_eq!(f.x.norm(), 0.0);
        assert_eq!(f.z.norm(), 0.0);
        assert!((f.y.norm() - 0.25).abs() < 1e-15);
        let f = vef(SurfacePoint::new(1.0, 1.0), &TerminalPosition::on_cpl(2.0).unwrap(), &c).unwrap();
        let s = 6f64.powf(1.5);
        assert!((f.x.norm() - 1.0 / s).abs() < 1e-12);
        assert!((f.y.norm() - (1.0 / 6f64.sqrt() - 1.0 / s)).abs() < 1e-12);
        assert!((f.z.norm() - 2.0 / s).abs() < 1e-12);
        assert!((f.x.norm() - 0.068041).abs() < 1e-6);
        assert!((f.y.norm() - 0.340207).abs() < 1e-6);
        assert!((f.z.norm() - 0.136083).abs() < 1e-6);
    }

    #[test]
    fn sef_examples() {
        let c = cfg();
        let s = sef(SurfacePoint::new(0.0, 0.0), &TerminalPosition::on_cpl(5.0).unwrap(), &c).unwrap();
        assert!((s.norm() - 0.2).abs() < 1e-15);
        let s = sef(SurfacePoint::new(1.0, 1.0), &TerminalPosition::on_cpl(2.0).unwrap(), &c).unwrap();
        assert!((s.norm() - 10f64.sqrt() / 6f64.powf(1.25)).abs() < 1e-12);
        assert!((s.norm() - 0.336748).abs() < 1e-5);
        let grazing = sef(SurfacePoint::new(1.0, 0.0), &TerminalPosition::on_cpl(1e-9).unwrap(), &c).unwrap();
        assert!(grazing.norm() < 1e-4);
    }

    #[test]
    fn gradient_zero_factors() {
        let c = cfg();
        let g = vef_gradient(SurfacePoint::new(0.0, 0.0), &TerminalPosition::on_cpl(2.0).unwrap(), &c).unwrap();
        assert_eq!(g[0][1].norm(), 0.0);
        let p_t = TerminalPosition::new(0.2, 0.7, 2.0).unwrap();
        let s = sef_gradient(SurfacePoint::new(-1.0, 0.7), &p_t, &c).unwrap();
        assert_eq!(s[1].norm(), 0.0);
        let s = sef_gradient(SurfacePoint::new(0.0, 0.0), &TerminalPosition::on_cpl(3.0).unwrap(), &c).unwrap();
        assert_eq!(s[0].norm(), 0.0);
    }

    #[test]
    fn cpl_mirror_pair_cancels_cross_terms() {
        let c = cfg();
        let p_t = TerminalPosition::on_cpl(2.0).unwrap();
        let (a, b) = (0.7, 0.3);
        let g1 = vef_gradient(SurfacePoint::new(a, b), &p_t, &c).unwrap();
        let g2 = vef_gradient(SurfacePoint::new(-a, b), &p_t, &c).unwrap();
        let cross = |g: &Matrix3c, m: usize, n: usize| (0..3).map(|k| (g[k][m] * g[k][n].conj()).re).sum::<f64>();
        for (m, n) in [(0, 1), (0, 2)] {
            let s = cross(&g1, m, n) + cross(&g2, m, n);
            assert!(s.abs() < 1e-12 * cross(&g1, m, m).abs(), "{m}{n}");
        }
    }

    #[test]
    fn osef_single_cell() {
        let c = cfg();
        let geom = SurfaceGeometry::new(2.0).unwrap();
        let o = osef(&TerminalPosition::on_cpl(4.0).unwrap(), &geom, &c, 1).unwrap();
        assert!((o.norm() - 2.0 / 2f64.sqrt() / 4.0).abs() < 1e-14);
        assert!(osef(&TerminalPosition::on_cpl(4.0).unwrap(), &geom, &c, 4).is_err());
    }

    #[test]
    fn osef_grid_convergence() {
        let c = cfg();
        let geom = SurfaceGeometry::new(1.0).unwrap();
        let p = TerminalPosition::on_cpl(6.0).unwrap();
        let a = osef(&p, &geom, &c, 201 * 201).unwrap().norm();
        let b = osef(&p, &geom, &c, 401 * 401).unwrap().norm();
        assert!((a - b).abs() < 1e-3 * b);
    }

    #[test]
    fn osef_triangle_bound() {
        let c = cfg();
        let geom = SurfaceGeometry::new(1.5).unwrap();
        let p = TerminalPosition::new(0.4, -0.3, 2.0).unwrap();
        let alpha = 21 * 21;
        let grid = riemann_grid(&geom, alpha).unwrap();
        let max = grid
            .points()
            .iter()
            .map(|&(x, y, _)| sef(SurfacePoint::new(x, y), &p, &c).unwrap().norm())
            .fold(0.0, f64::max);
        let bound = osef_normalisation(&geom) * geom.area() * max;
        assert!(osef(&p, &geom, &c, alpha).unwrap().norm() <= bound);
    }

    #[test]
    fn fresnel_and_planewave_examples() {
        let c = cfg();
        let p_t = TerminalPosition::new(1.0, -2.0, 5.0).unwrap();
        let exact = scalar_green(p_t.r_to(), &c).unwrap();
        for g in [green_fresnel(SurfacePoint::new(0.0, 0.0), &p_t, &c).unwrap(), green_planewave(SurfacePoint::new(0.0, 0.0), &p_t, &c).unwrap()] {
            assert!((g - exact).norm() < 1e-12 * exact.norm());
        }
        let on_axis = TerminalPosition::on_cpl(5.0).unwrap();
        let p_r = SurfacePoint::new(0.3, -0.4);
        let g = green_fresnel(p_r, &on_axis, &c).unwrap();
        let expect = approx_prefactor(5.0, &c) * expj(-c.wave_number() * (5.0 + 0.25 / 10.0));
        assert!((g - expect).norm() < 1e-12 * g.norm());
    }

    #[test]
    fn fraunhofer_phase_criterion() {
        let c = cfg();
        let geom = SurfaceGeometry::new(1.0).unwrap();
        let r_to = 2.0 * geom.diagonal().powi(2) / c.wavelength() * 1.0001;
        let h = geom.half_side();
        let mut worst: f64 = 0.0;
        for i in 0..24 {
            let az = i as f64 * PI / 12.0;
            for zen in [0.0f64, 0.2, 0.5, 0.9] {
                let p_t = TerminalPosition::new(r_to * zen.sin() * az.cos(), r_to * zen.sin() * az.sin(), r_to * zen.cos()).unwrap();
                for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let p_r = SurfacePoint::new(sx * h, sy * h);
                    let ex = scalar_green(((p_r.x - p_t.x).powi(2) + (p_r.y - p_t.y).powi(2) + p_t.z.powi(2)).sqrt(), &c).unwrap();
                    let pw = green_planewave(p_r, &p_t, &c).unwrap();
                    worst = worst.max((ex / pw).arg().abs());
                }
            }
        }
        assert!(worst <= PI / 8.0 * 1.01, "{worst}");
        assert!(worst > PI / 8.0 * 0.9);
    }

    fn random_config(seed: u64) -> (SurfacePoint, TerminalPosition, PhysicalConfig) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let p_r = SurfacePoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let p_t = TerminalPosition::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.2..8.0)).unwrap();
        let cfg = PhysicalConfig::new(rng.gen_range(0.005..0.5), 1.0).unwrap().with_dipole(rng.gen_range(0.1..2.0), 1e-3).unwrap();
        (p_r, p_t, cfg)
    }

    #[test]
    fn cartesian_vef_equals_spherical_form() {
        for seed in 0..10_000 {
            let (p_r, p_t, c) = random_config(seed);
            let s = to_local_spherical(p_r, &p_t).unwrap();
            // -G_s I l sin(theta) theta_hat, with I l = 2 lambda E_in / eta.
            let il = 2.0 * c.wavelength() * c.e_in() / c.impedance();
            let amp = -scalar_green(s.r, &c).unwrap() * il * s.sin_theta;
            let th = s.theta_hat();
            let f = vef(p_r, &p_t, &c).unwrap().as_array();
            let scale = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for i in 0..3 {
                assert!((amp * th[i] - f[i]).norm() <= 1e-12 * scale, "seed {seed} comp {i}");
            }
        }
    }

    #[test]
    fn sef_is_normal_poynting_projection() {
        for seed in 0..2_000 {
            let (p_r, p_t, c) = random_config(seed);
            let s = to_local_spherical(p_r, &p_t).unwrap();
            let lhs = sef(p_r, &p_t, &c).unwrap().norm_sqr();
            let rhs = vef(p_r, &p_t, &c).unwrap().norm_sqr() * (-s.r_hat()[2]);
            assert!((lhs - rhs).abs() <= 1e-12 * lhs, "seed {seed}");
            let il = 2.0 * c.wavelength() * c.e_in() / c.impedance();
            let spherical = scalar_green(s.r, &c).unwrap().norm() * il * (s.sin_theta.powi(3) * s.sin_phi).sqrt();
            assert!((spherical - lhs.sqrt()).abs() <= 1e-12 * spherical);
        }
    }

    fn central_diff<F: Fn(&TerminalPosition) -> Vec<Complex64>>(f: F, p_t: &TerminalPosition, n: usize, h: f64) -> Vec<Complex64> {
        let mut a = p_t.as_array();
        let mut b = p_t.as_array();
        a[n] += h;
        b[n] -= h;
        let pa = TerminalPosition::new(a[0], a[1], a[2]).unwrap();
        let pb = TerminalPosition::new(b[0], b[1], b[2]).unwrap();
        f(&pa).iter().zip(f(&pb)).map(|(x, y)| (x - y) / (2.0 * h)).collect()
    }

    #[test]
    fn gradients_match_finite_differences() {
        for seed in 100..200 {
            let (p_r, p_t, c) = random_config(seed);
            // Keep k0 r moderate so the O((k0 h)^2) truncation of the difference stays below 1e-6.
            let c = c.with_wavelength(0.1 + (seed % 10) as f64 * 0.09).unwrap();
            let r = to_local_spherical(p_r, &p_t).unwrap().r;
            let h = 1e-6 * r;
            let g = vef_gradient(p_r, &p_t, &c).unwrap();
            let s = sef_gradient(p_r, &p_t, &c).unwrap();
            let vscale = g.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
            let sscale = s.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for n in 0..3 {
                let fd = central_diff(|p| vef(p_r, p, &c).unwrap().as_array().to_vec(), &p_t, n, h);
                for k in 0..3 {
                    assert!((fd[k] - g[k][n]).norm() <= 1e-6 * vscale, "seed {seed} vef {k}{n}");
                }
                let fd = central_diff(|p| vec![sef(p_r, p, &c).unwrap()], &p_t, n, h);
                assert!((fd[0] - s[n]).norm() <= 1e-6 * sscale, "seed {seed} sef {n}");
            }
        }
    }

    proptest! {
        #[test]
        fn fields_linear_in_amplitude(xr in -2.0f64..2.0, yr in -2.0f64..2.0, z in 0.1f64..5.0, amp in 0.1f64..10.0) {
            let base = PhysicalConfig::new(0.02, 1.0).unwrap();
            let scaled = base.with_dipole(amp, 2.0 * base.wavelength() / base.impedance()).unwrap();
            let p_t = TerminalPosition::new(0.1, -0.3, z).unwrap();
            let p_r = SurfacePoint::new(xr, yr);
            let a = vef(p_r, &p_t, &base).unwrap();
            let b = vef(p_r, &p_t, &scaled).unwrap();
            for (u, v) in a.as_array().iter().zip(b.as_array()) {
                prop_assert!((u * amp - v).norm() <= 1e-12 * v.norm().max(1e-300));
                if u.norm() > 0.0 {
                    prop_assert!((u.arg() - v.arg()).abs() < 1e-12);
                }
            }
            let sa = sef(p_r, &p_t, &base).unwrap();
            let sb = sef(p_r, &p_t, &scaled).unwrap();
            prop_assert!((sa * amp - sb).norm() <= 1e-12 * sb.norm());
        }
    }
}
