//! Terminals on the central perpendicular line (CPL).
//!
//! With $u = x_r/z_t$, $v = y_r/z_t$ the aperture becomes
//! $R_\tau = \{|u|, |v| \le \tau/\sqrt8\}$ with $\tau = D_r/z_t$, the FIM is
//! diagonal and every bound reduces to dimensionless integrals:
//!
//! $$\mathrm{CRB}_1^c(\kappa) = \frac{\mathrm{SNR}^{-1}}{2(k_0^2\rho_{11\kappa} + z_t^{-2}\rho_{12\kappa})},\qquad
//!   \mathrm{CRB}_2^c(\kappa) = \frac{\mathrm{SNR}^{-1}}{2(k_0^2\rho_{21\kappa} + z_t^{-2}\rho_{22\kappa})}.$$
//!
//! Quadrature is always the source of truth. The closed forms and disk
//! bounds are carried alongside for validation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::crb::{crb_from_fim, CrbPath, CrbResult, FimMatrix, InversionMode, Numerics};
use crate::error::{CrbError, Result};
use crate::geometry::{FieldModel, PhysicalConfig, SurfaceGeometry};
use crate::quadrature::{integrate_2d, riemann_grid, QuadratureSpec, RectDomain};

/// Relative agreement a closed form must reach to count as confirmed.
pub const CLOSED_FORM_TOL: f64 = 1e-6;

/// Depth below which the large-distance simplification is flagged, in wavelengths.
pub const LARGE_DISTANCE_WAVELENGTHS: f64 = 100.0;

/// Asymptotic gap constants $\Delta C_\kappa = p_\kappa\,\mathrm{SNR}^{-1}\lambda^2$.
pub const P_X: f64 = 15.0 / (64.0 * PI * PI * PI);
pub const P_Y: f64 = 15.0 / (32.0 * PI * PI * PI);
pub const P_Z: f64 = 15.0 / (64.0 * PI * PI * PI) - 1.0 / (6.0 * PI * PI * PI);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CplScenario {
    pub tau: f64,
    pub z_t: f64,
    pub cfg: PhysicalConfig,
    pub model: FieldModel,
}

impl CplScenario {
    pub fn new(tau: f64, z_t: f64, cfg: PhysicalConfig, model: FieldModel) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(CrbError::domain(format!("tau must be positive, got {tau}")));
        }
        if !(z_t > 0.0 && z_t.is_finite()) {
            return Err(CrbError::domain(format!("z_t must be positive, got {z_t}")));
        }
        Ok(Self { tau, z_t, cfg, model })
    }

    pub fn from_aperture(d_r: f64, z_t: f64, cfg: PhysicalConfig, model: FieldModel) -> Result<Self> {
        Self::new(d_r / z_t, z_t, cfg, model)
    }

    pub fn d_r(&self) -> f64 {
        self.tau * self.z_t
    }

    pub fn geometry(&self) -> Result<SurfaceGeometry> {
        SurfaceGeometry::new(self.d_r())
    }
}

/// Outcome of comparing a printed closed form with quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedFormStatus {
    Agrees,
    PrintedFormMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormCheck {
    pub closed_form: f64,
    pub numeric: f64,
    pub rel_diff: f64,
    pub status: ClosedFormStatus,
}

impl ClosedFormCheck {
    fn new(closed_form: f64, numeric: f64) -> Self {
        let rel_diff = (closed_form - numeric).abs() / numeric.abs().max(f64::MIN_POSITIVE);
        let status = if rel_diff <= CLOSED_FORM_TOL { ClosedFormStatus::Agrees } else { ClosedFormStatus::PrintedFormMismatch };
        Self { closed_form, numeric, rel_diff, status }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoEntry {
    pub value: f64,
    pub closed_form: Option<ClosedFormCheck>,
    /// Inscribed and circumscribed disk integrals.
    pub bounds: Option<(f64, f64)>,
}

impl RhoEntry {
    /// `true` when there are no bounds or they bracket the value.
    pub fn within_bounds(&self) -> bool {
        self.bounds.map_or(true, |(lo, hi)| lo <= self.value && self.value <= hi)
    }
}

/// The six CPL integrals for one observation model, in `x, y, z` order.
///
/// `first` holds $\rho_{11\kappa}$ or $\rho_{21\kappa}$ and `second` holds
/// $\rho_{12\kappa}$ or $\rho_{22\kappa}$.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoCplTable {
    pub model: FieldModel,
    pub tau: f64,
    pub first: [RhoEntry; 3],
    pub second: [RhoEntry; 3],
    pub error: f64,
}

impl RhoCplTable {
    pub fn first_values(&self) -> [f64; 3] {
        self.first.map(|e| e.value)
    }

    pub fn second_values(&self) -> [f64; 3] {
        self.second.map(|e| e.value)
    }

    /// Labelled entries such as `("rho11x", entry)`.
    pub fn entries(&self) -> Vec<(String, RhoEntry)> {
        let f = match self.model {
            FieldModel::Vef => 1,
            _ => 2,
        };
        let mut out = Vec::with_capacity(6);
        for (i, c) in ["x", "y", "z"].iter().enumerate() {
            out.push((format!("rho{f}1{c}"), self.first[i]));
        }
        for (i, c) in ["x", "y", "z"].iter().enumerate() {
            out.push((format!("rho{f}2{c}"), self.second[i]));
        }
        out
    }
}

/// Normalised CPL integrands: `[first x, y, z, second x, y, z]`.
pub(crate) fn cpl_integrands(model: FieldModel, u: f64, v: f64) -> [f64; 6] {
    let (uu, vv) = (u * u, v * v);
    let s = uu + vv + 1.0;
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s2 * s2;
    let p = uu + 1.0;
    match model {
        FieldModel::Vef => [
            uu * p / s3,
            vv * p / s3,
            p / s3,
            (uu * uu + vv * vv + uu + vv - uu * vv) / s4,
            p * (uu + 4.0 * vv + 1.0) / s4,
            (vv * vv + uu * vv + 1.0) / s4,
        ],
        _ => {
            let s72 = s3 * s.sqrt();
            let s92 = s72 * s;
            let ax = 3.0 * uu - 2.0 * vv + 3.0;
            let az = uu * uu + uu * vv + 3.0 * vv - uu - 2.0;
            [
                uu * p / s72,
                vv * p / s72,
                p / s72,
                uu * ax * ax / (4.0 * p * s92),
                25.0 * vv * p / (4.0 * s92),
                az * az / (4.0 * p * s92),
            ]
        }
    }
}

fn pointwise(model: FieldModel) -> Result<()> {
    if model == FieldModel::Osef {
        return Err(CrbError::Unsupported("the overall scalar field has no CPL integrals".into()));
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(CrbError::domain(format!("tau must be positive, got {tau}")));
    }
    Ok(())
}

/// Raw quadrature of the six integrals over a normalised rectangle.
pub(crate) fn rho_values_on(model: FieldModel, dom: &RectDomain, quad: &QuadratureSpec) -> Result<([f64; 6], f64)> {
    let res = integrate_2d(|u, v| cpl_integrands(model, u, v), dom, quad)?;
    if !res.converged {
        return Err(CrbError::Numerical { message: "CPL integral did not converge".into(), location: None });
    }
    Ok((res.value, res.error))
}

/// Quadrature of the six CPL integrals, annotated with closed forms and bounds.
pub fn rho_numeric(tau: f64, model: FieldModel, quad: &QuadratureSpec) -> Result<RhoCplTable> {
    check_tau(tau)?;
    pointwise(model)?;
    let (v, error) = rho_values_on(model, &RectDomain::r_tau(tau)?, quad)?;
    let bounds = rho_bounds(tau, model)?;
    let mut first = [RhoEntry { value: 0.0, closed_form: None, bounds: None }; 3];
    let mut second = first;
    for i in 0..3 {
        first[i] = RhoEntry { value: v[i], closed_form: None, bounds: bounds.first[i] };
        second[i] = RhoEntry { value: v[i + 3], closed_form: None, bounds: bounds.second[i] };
    }
    if model == FieldModel::Vef {
        let cf = rho_closed_form(tau)?;
        second[0].closed_form = Some(ClosedFormCheck::new(cf.rho12x, second[0].value));
        second[1].closed_form = Some(ClosedFormCheck::new(cf.rho12y, second[1].value));
        first[2].closed_form = Some(ClosedFormCheck::new(cf.rho11z, first[2].value));
        second[2].closed_form = Some(ClosedFormCheck::new(cf.rho12z, second[2].value));
    }
    Ok(RhoCplTable { model, tau, first, second, error })
}

/// Closed-form vector-field integrals exactly as printed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForms {
    pub rho12x: f64,
    pub rho12y: f64,
    pub rho11z: f64,
    pub rho12z: f64,
}

pub fn rho_closed_form(tau: f64) -> Result<ClosedForms> {
    check_tau(tau)?;
    let t2 = tau * tau;
    let a = t2 + 8.0;
    let b = t2 + 4.0;
    let sa = a.sqrt();
    let f_tan = (tau / sa).atan();
    Ok(ClosedForms {
        rho12x: (f_tan / (2.0 * sa) - t2 * (3.0 * t2 + 16.0) / (b * b)) / a,
        rho12y: (9.0 * t2 * t2 + 152.0 * t2 + 544.0) * tau * f_tan / (2.0 * a.powf(2.5))
            + t2 * (3.0 * t2 * t2 + 8.0 * t2 - 32.0) / (a * a * b * b),
        rho11z: tau / a * ((3.0 * t2 + 28.0) / sa * f_tan + 2.0 * tau / b),
        rho12z: 2.0 * tau / (a * a) * ((t2 * t2 + 16.0 * t2 + 88.0) / sa * f_tan + 16.0 * tau * (t2 + 5.0) / (b * b)),
    })
}

/// Disk bounds in the same layout as [`RhoCplTable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoBounds {
    pub first: [Option<(f64, f64)>; 3],
    pub second: [Option<(f64, f64)>; 3],
}

/// Integrals over the inscribed disk of radius $\tau/\sqrt8$ and the
/// circumscribed disk of radius $\tau/2$.
pub fn rho_bounds(tau: f64, model: FieldModel) -> Result<RhoBounds> {
    check_tau(tau)?;
    pointwise(model)?;
    let t2 = tau * tau;
    let t4 = t2 * t2;
    let a = t2 + 8.0;
    let b = t2 + 4.0;
    let s2 = 2f64.sqrt();
    Ok(match model {
        FieldModel::Vef => RhoBounds {
            first: [
                Some((
                    3.0 * PI / 8.0 * (t2 / 8.0).ln_1p() - PI * t2 * (5.0 * t2 + 48.0) / (16.0 * a * a),
                    3.0 * PI / 8.0 * (t2 / 4.0).ln_1p() - PI * t2 * (5.0 * t2 + 24.0) / (16.0 * b * b),
                )),
                Some((
                    PI / 8.0 * (t2 / 8.0).ln_1p() + PI * t2 * (t2 - 16.0) / (16.0 * a * a),
                    PI / 8.0 * (t2 / 4.0).ln_1p() + PI * t2 * (t2 - 8.0) / (16.0 * b * b),
                )),
                None,
            ],
            second: [None; 3],
        },
        _ => RhoBounds {
            first: [
                Some((
                    8.0 * PI / 15.0 - s2 * PI * (45.0 * t4 + 640.0 * t2 + 2048.0) / (30.0 * a.powf(2.5)),
                    8.0 * PI / 15.0 - PI * (45.0 * t4 + 320.0 * t2 + 512.0) / (30.0 * b.powf(2.5)),
                )),
                Some((
                    4.0 * PI / 15.0 - s2 * PI * (15.0 * t4 + 320.0 * t2 + 1024.0) / (30.0 * a.powf(2.5)),
                    4.0 * PI / 15.0 - PI * (15.0 * t4 + 160.0 * t2 + 256.0) / (30.0 * b.powf(2.5)),
                )),
                Some((
                    8.0 * PI / 15.0 - 16.0 * s2 * PI * (5.0 * t2 + 64.0) / (15.0 * a.powf(2.5)),
                    8.0 * PI / 15.0 - 8.0 * PI * (5.0 * t2 + 32.0) / (15.0 * b.powf(2.5)),
                )),
            ],
            second: [
                Some((
                    3.0 * PI / 14.0
                        - PI * (63.0 * s2 * t4 - 224.0 * a.powf(1.5) + 64.0 * s2 * (21.0 * t2 + 80.0)) / (7.0 * a.powf(3.5)),
                    3.0 * PI / 14.0
                        - PI * (63.0 * t4 - 112.0 * b.powf(1.5) + 32.0 * (21.0 * t2 + 40.0)) / (14.0 * b.powf(3.5)),
                )),
                Some((
                    10.0 * PI / 21.0 - 5.0 * s2 * PI * (35.0 * t4 + 896.0 * t2 + 2048.0) / (21.0 * a.powf(3.5)),
                    10.0 * PI / 21.0 - 5.0 * PI * (35.0 * t4 + 448.0 * t2 + 512.0) / (42.0 * b.powf(3.5)),
                )),
                Some((
                    13.0 * PI / 42.0
                        - PI * (7.0 * s2 * t4 * (3.0 * t2 + 64.0) + 1344.0 * a.powf(1.5) - 512.0 * s2 * (7.0 * t2 + 16.0))
                            / (42.0 * a.powf(3.5)),
                    13.0 * PI / 42.0
                        - PI * (7.0 * t4 * (3.0 * t2 + 32.0) + 336.0 * b.powf(1.5) - 128.0 * (7.0 * t2 + 8.0))
                            / (42.0 * b.powf(3.5)),
                )),
            ],
        },
    })
}

fn from_rho(first: [f64; 3], second: [f64; 3], sc: &CplScenario, keep_second: bool) -> [f64; 3] {
    let k2 = sc.cfg.wave_number().powi(2);
    let w = if keep_second { sc.z_t.powi(-2) } else { 0.0 };
    let info: [f64; 3] = std::array::from_fn(|i| 2.0 * sc.cfg.snr() * (k2 * first[i] + w * second[i]));
    crb_from_fim(&FimMatrix::diagonal(info), InversionMode::PerComponent)
}

/// Squared magnitudes of the discretised overall-scalar-field sums,
/// $\rho_3^{\kappa\kappa} = \frac{D_r^2}{2\alpha^2}\,|\Sigma_\kappa|^2$, with $E_{in} = 1$.
pub fn rho3_cpl(sc: &CplScenario, alpha: usize) -> Result<[f64; 3]> {
    let geom = sc.geometry()?;
    let grid = riemann_grid(&geom, alpha)?;
    let k = sc.cfg.wave_number();
    let z = sc.z_t;
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for &yj in &grid.ys {
        for &xi in &grid.xs {
            let r = (xi * xi + yj * yj + z * z).sqrt();
            let r52 = r.powf(-2.5);
            let g_r = Complex64::new(2.5 * r52 / (r * r), k * r52 / r);
            let g2 = z * (z * z + xi * xi);
            let g_zx = g2.sqrt() * Complex64::from_polar(1.0, -k * r);
            acc[0] += xi * g_zx * (g_r - z / g2 * r52);
            acc[1] += yj * g_zx * g_r;
            acc[2] += g_zx * ((3.0 * z * z + xi * xi) / (2.0 * g2) * r52 - z * g_r);
        }
    }
    let alpha = alpha as f64;
    let scale = geom.diagonal().powi(2) / (2.0 * alpha * alpha);
    let out = acc.map(|a| scale * a.norm_sqr());
    if out.iter().any(|v| !v.is_finite()) {
        return Err(CrbError::Numerical { message: "overall scalar field sum is not finite".into(), location: None });
    }
    Ok(out)
}

/// CRBs for a CPL terminal from the normalised integrals.
pub fn crb_cpl(sc: &CplScenario, numerics: &Numerics) -> Result<CrbResult> {
    match sc.model {
        FieldModel::Osef => {
            let rho3 = rho3_cpl(sc, numerics.alpha)?;
            let fim = FimMatrix::diagonal(rho3.map(|r| 2.0 * sc.cfg.snr() * r));
            let mut out = CrbResult::new(crb_from_fim(&fim, InversionMode::PerComponent), sc.model, CrbPath::CplNormalized);
            out.rank_deficient = true;
            Ok(out)
        }
        model => {
            let t = rho_numeric(sc.tau, model, &numerics.quad)?;
            Ok(CrbResult::new(from_rho(t.first_values(), t.second_values(), sc, true), model, CrbPath::CplNormalized))
        }
    }
}

/// CRBs with the $z_t^{-2}$ terms dropped, valid for $z_t \gg \lambda$.
pub fn crb_cpl_large_zt(sc: &CplScenario, numerics: &Numerics) -> Result<CrbResult> {
    pointwise(sc.model)?;
    let t = rho_numeric(sc.tau, sc.model, &numerics.quad)?;
    let mut out = CrbResult::new(from_rho(t.first_values(), t.second_values(), sc, false), sc.model, CrbPath::CplLargeDistance);
    if sc.z_t < LARGE_DISTANCE_WAVELENGTHS * sc.cfg.wavelength() {
        out.warnings.push(format!(
            "z_t = {} m is below {} wavelengths; the large-distance simplification may be inaccurate",
            sc.z_t, LARGE_DISTANCE_WAVELENGTHS
        ));
    }
    Ok(out)
}

/// Ratios $k_0^2\rho_{\cdot1\kappa} / (z_t^{-2}\rho_{\cdot2\kappa})$ for each coordinate.
pub fn large_distance_ratios(sc: &CplScenario, quad: &QuadratureSpec) -> Result<[f64; 3]> {
    let t = rho_numeric(sc.tau, sc.model, quad)?;
    let k2z2 = (sc.cfg.wave_number() * sc.z_t).powi(2);
    Ok(std::array::from_fn(|i| k2z2 * t.first[i].value / t.second[i].value))
}

/// Limits of the CPL bounds as $\tau \to \infty$.
///
/// The vector-field `x` and `y` limits keep their $\ln\tau$ dependence.
pub fn crb_asymptotic(lambda: f64, snr: f64, tau: f64, model: FieldModel) -> Result<CrbResult> {
    if !(lambda > 0.0 && snr > 0.0) {
        return Err(CrbError::domain("wavelength and SNR must be positive"));
    }
    let c = lambda * lambda / (snr * PI.powi(3));
    let crb = match model {
        FieldModel::Vef => {
            if !(tau > 1.0) {
                return Err(CrbError::domain("the vector-field limit needs tau > 1"));
            }
            let l = tau.ln();
            [c / (6.0 * l), c / (2.0 * l), c / 6.0]
        }
        FieldModel::Sef => [c * 15.0 / 64.0, c * 15.0 / 32.0, c * 15.0 / 64.0],
        FieldModel::Osef => {
            return Err(CrbError::Unsupported("no asymptotic limit for the overall scalar field".into()));
        }
    };
    Ok(CrbResult::new(crb, model, CrbPath::Asymptotic))
}
