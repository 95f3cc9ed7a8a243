//! Shared domain types: physical constants, terminal and surface geometry,
//! and the local spherical frame of the $+Y$ dipole.
//!
//! Lengths are metres, SNR is a linear ratio $|E_{in}|^2/\sigma^2$.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{CrbError, Result};

/// Free-space intrinsic impedance in ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 376.730;

/// Wavelength, impedance, SNR and source amplitude of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    wavelength: f64,
    eta: f64,
    snr: f64,
    e_in: f64,
}

impl PhysicalConfig {
    /// Builds a configuration with unit source amplitude and free-space impedance.
    pub fn new(wavelength: f64, snr: f64) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(CrbError::domain(format!("wavelength must be positive, got {wavelength}")));
        }
        if !(snr > 0.0 && snr.is_finite()) {
            return Err(CrbError::domain(format!("snr must be positive, got {snr}")));
        }
        Ok(Self { wavelength, eta: FREE_SPACE_IMPEDANCE, snr, e_in: 1.0 })
    }

    pub fn from_snr_db(wavelength: f64, snr_db: f64) -> Result<Self> {
        Self::new(wavelength, db_to_linear(snr_db))
    }

    pub fn with_impedance(mut self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(CrbError::domain(format!("impedance must be positive, got {eta}")));
        }
        self.eta = eta;
        Ok(self)
    }

    /// Derives the source amplitude $E_{in} = \eta I_{in} l_t / (2\lambda)$ from a dipole.
    pub fn with_dipole(mut self, current: f64, length: f64) -> Result<Self> {
        if !(current > 0.0 && length > 0.0) {
            return Err(CrbError::domain("dipole current and length must be positive"));
        }
        self.e_in = self.eta * current * length / (2.0 * self.wavelength);
        Ok(self)
    }

    pub fn with_snr(mut self, snr: f64) -> Result<Self> {
        if !(snr > 0.0 && snr.is_finite()) {
            return Err(CrbError::domain(format!("snr must be positive, got {snr}")));
        }
        self.snr = snr;
        Ok(self)
    }

    pub fn with_wavelength(self, wavelength: f64) -> Result<Self> {
        let mut out = Self::new(wavelength, self.snr)?;
        out.eta = self.eta;
        out.e_in = self.e_in;
        Ok(out)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wave_number(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn impedance(&self) -> f64 {
        self.eta
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn snr_db(&self) -> f64 {
        linear_to_db(self.snr)
    }

    pub fn e_in(&self) -> f64 {
        self.e_in
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Unknown terminal position $\xi = (x_t, y_t, z_t)$ with $z_t > 0$.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerminalPosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TerminalPosition {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(CrbError::domain("terminal coordinates must be finite"));
        }
        if !(z > 0.0 && z.is_finite()) {
            return Err(CrbError::domain(format!("terminal must lie in front of the surface (z_t > 0), got {z}")));
        }
        Ok(Self { x, y, z })
    }

    /// A terminal on the central perpendicular line.
    pub fn on_cpl(z: f64) -> Result<Self> {
        Self::new(0.0, 0.0, z)
    }

    pub fn is_cpl(&self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    pub fn r_to(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Zenith angle in $[0, \pi/2)$.
    pub fn zenith(&self) -> f64 {
        (self.z / self.r_to()).acos()
    }

    /// Azimuth angle in $[0, 2\pi)$.
    pub fn azimuth(&self) -> f64 {
        let a = self.y.atan2(self.x);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }

    /// Direction cosines $(\Psi, \Omega, \Phi)$.
    pub fn direction_cosines(&self) -> [f64; 3] {
        let r = self.r_to();
        [self.x / r, self.y / r, self.z / r]
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Square receiving aperture of diagonal `d_r`, centred at the origin in $z = 0$.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGeometry {
    d_r: f64,
}

impl SurfaceGeometry {
    pub fn new(d_r: f64) -> Result<Self> {
        if !(d_r > 0.0 && d_r.is_finite()) {
            return Err(CrbError::domain(format!("surface diagonal must be positive, got {d_r}")));
        }
        Ok(Self { d_r })
    }

    pub fn diagonal(&self) -> f64 {
        self.d_r
    }

    /// Half side length $D_r/\sqrt{8}$.
    pub fn half_side(&self) -> f64 {
        self.d_r / 8f64.sqrt()
    }

    pub fn area(&self) -> f64 {
        self.d_r * self.d_r / 2.0
    }

    /// $\tau = D_r / z_t$.
    pub fn tau(&self, z_t: f64) -> f64 {
        self.d_r / z_t
    }
}

/// Which observation the receiver has access to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum FieldModel {
    /// All three cartesian components of the electric field, pointwise.
    Vef,
    /// Normal Poynting component magnitude with propagation phase, pointwise.
    Sef,
    /// Surface integral of the scalar field: one complex number per antenna.
    Osef,
}

impl FieldModel {
    pub const ALL: [FieldModel; 3] = [FieldModel::Vef, FieldModel::Sef, FieldModel::Osef];

    pub fn name(&self) -> &'static str {
        match self {
            FieldModel::Vef => "vef",
            FieldModel::Sef => "sef",
            FieldModel::Osef => "osef",
        }
    }
}

impl std::str::FromStr for FieldModel {
    type Err = CrbError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vef" => Ok(FieldModel::Vef),
            "sef" => Ok(FieldModel::Sef),
            "osef" => Ok(FieldModel::Osef),
            other => Err(CrbError::config(format!("unknown field model '{other}'"))),
        }
    }
}

impl std::fmt::Display for FieldModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Fresnel and Fraunhofer distances of an aperture at a wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeDistances {
    pub fresnel: f64,
    pub fraunhofer: f64,
}

impl RegimeDistances {
    pub fn new(geom: &SurfaceGeometry, cfg: &PhysicalConfig) -> Self {
        let d = geom.diagonal();
        let lambda = cfg.wavelength();
        let out = Self {
            fresnel: 0.5 * (d.powi(3) / lambda).sqrt(),
            fraunhofer: 2.0 * d * d / lambda,
        };
        if d > lambda / 2.0 {
            assert!(out.fresnel < out.fraunhofer, "Fresnel distance must precede Fraunhofer distance");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Reactive,
    RadiativeNear,
    Far,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Reactive => "reactive",
            Regime::RadiativeNear => "radiative-near",
            Regime::Far => "far",
        }
    }
}

/// Classifies a terminal range. Boundaries are half-open: `r_to >= d_F` is far.
pub fn regime_classify(r_to: f64, geom: &SurfaceGeometry, cfg: &PhysicalConfig) -> Result<Regime> {
    if !(r_to > 0.0) {
        return Err(CrbError::domain(format!("range must be positive, got {r_to}")));
    }
    let d = RegimeDistances::new(geom, cfg);
    Ok(if r_to < d.fresnel {
        Regime::Reactive
    } else if r_to >= d.fraunhofer {
        Regime::Far
    } else {
        Regime::RadiativeNear
    })
}

/// A point on the receiving plane $z = 0$.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub x: f64,
    pub y: f64,
}

impl SurfacePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Local spherical frame of the dipole, whose polar axis is $+Y$.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSpherical {
    pub r: f64,
    pub sin_theta: f64,
    pub cos_theta: f64,
    pub sin_phi: f64,
    pub cos_phi: f64,
}

impl LocalSpherical {
    /// Unit vector $\hat\theta$ in the global cartesian basis.
    pub fn theta_hat(&self) -> [f64; 3] {
        [
            self.cos_theta * self.cos_phi,
            -self.sin_theta,
            -self.cos_theta * self.sin_phi,
        ]
    }

    /// Unit vector $\hat r$ from terminal to the surface point.
    pub fn r_hat(&self) -> [f64; 3] {
        [
            self.sin_theta * self.cos_phi,
            self.cos_theta,
            -self.sin_theta * self.sin_phi,
        ]
    }
}

/// Distance from terminal to surface point together with the local angles.
pub fn to_local_spherical(p_r: SurfacePoint, p_t: &TerminalPosition) -> Result<LocalSpherical> {
    let x = p_r.x - p_t.x;
    let y = p_r.y - p_t.y;
    let z = p_t.z;
    let r = (x * x + y * y + z * z).sqrt();
    if !(r > 0.0) {
        return Err(CrbError::domain("surface point coincides with the terminal"));
    }
    let rho = (x * x + z * z).sqrt();
    let (sin_phi, cos_phi) = if rho > 0.0 { (z / rho, x / rho) } else { (0.0, 1.0) };
    Ok(LocalSpherical {
        r,
        sin_theta: rho / r,
        cos_theta: y / r,
        sin_phi,
        cos_phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cpl_center_frame() {
        let s = to_local_spherical(SurfacePoint::new(0.0, 0.0), &TerminalPosition::on_cpl(2.0).unwrap()).unwrap();
        assert_eq!(s.r, 2.0);
        assert!((s.sin_theta.powi(2) - 1.0).abs() < 1e-15);
        assert!((s.sin_theta * s.cos_theta * s.cos_phi).abs() < 1e-15);
    }

    #[test]
    fn pythagorean_distance() {
        let s = to_local_spherical(SurfacePoint::new(1.0, 1.0), &TerminalPosition::on_cpl(2.0).unwrap()).unwrap();
        assert!((s.r - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(PhysicalConfig::new(0.0, 1.0).is_err());
        assert!(PhysicalConfig::new(0.01, -1.0).is_err());
        assert!(TerminalPosition::new(0.0, 0.0, 0.0).is_err());
        assert!(SurfaceGeometry::new(-1.0).is_err());
    }

    #[test]
    fn dipole_amplitude() {
        let cfg = PhysicalConfig::new(0.01, 10.0).unwrap().with_dipole(2.0, 0.003).unwrap();
        assert_eq!(cfg.e_in(), FREE_SPACE_IMPEDANCE * 2.0 * 0.003 / (2.0 * 0.01));
    }

    #[test]
    fn regime_examples() {
        let cfg = PhysicalConfig::new(0.01, 10.0).unwrap();
        let g3 = SurfaceGeometry::new(3.0).unwrap();
        let d = RegimeDistances::new(&g3, &cfg);
        assert!((d.fresnel - 0.5 * 2700f64.sqrt()).abs() < 1e-12);
        assert_eq!(regime_classify(6.0, &g3, &cfg).unwrap(), Regime::Reactive);
        let g01 = SurfaceGeometry::new(0.1).unwrap();
        assert_eq!(regime_classify(5.0, &g01, &cfg).unwrap(), Regime::Far);
        let df = RegimeDistances::new(&g01, &cfg).fraunhofer;
        assert_eq!(regime_classify(df, &g01, &cfg).unwrap(), Regime::Far);
        assert_eq!(regime_classify(0.5 * (df + RegimeDistances::new(&g01, &cfg).fresnel), &g01, &cfg).unwrap(), Regime::RadiativeNear);
    }

    proptest! {
        #[test]
        fn snr_db_round_trip(db in -40.0f64..60.0) {
            let cfg = PhysicalConfig::from_snr_db(0.01, db).unwrap();
            prop_assert!((cfg.snr_db() - db).abs() < 1e-12);
        }

        #[test]
        fn direction_cosines_are_unit(x in -50.0f64..50.0, y in -50.0f64..50.0, z in 1e-3f64..50.0) {
            let p = TerminalPosition::new(x, y, z).unwrap();
            let [a, b, c] = p.direction_cosines();
            prop_assert!((a * a + b * b + c * c - 1.0).abs() < 1e-14);
            let (phi, psi) = (p.zenith(), p.azimuth());
            prop_assert!((0.0..=PI / 2.0).contains(&phi));
            prop_assert!((0.0..2.0 * PI).contains(&psi));
            prop_assert!((phi.sin() * psi.cos() - a).abs() < 1e-12);
            prop_assert!((phi.sin() * psi.sin() - b).abs() < 1e-12);
        }

        #[test]
        fn spherical_identities(xr in -10.0f64..10.0, yr in -10.0f64..10.0,
                                xt in -10.0f64..10.0, yt in -10.0f64..10.0, zt in 1e-2f64..20.0) {
            let p_t = TerminalPosition::new(xt, yt, zt).unwrap();
            let s = to_local_spherical(SurfacePoint::new(xr, yr), &p_t).unwrap();
            let (x, y, r2) = (xr - xt, yr - yt, s.r * s.r);
            let scale = 1.0 + (x * y / r2).abs();
            prop_assert!((s.sin_theta * s.cos_theta * s.cos_phi - x * y / r2).abs() <= 1e-13 * scale);
            prop_assert!((s.sin_theta.powi(2) - (1.0 - y * y / r2)).abs() <= 1e-13);
            prop_assert!((s.sin_theta * s.cos_theta * s.sin_phi - zt * y / r2).abs() <= 1e-13 * (1.0 + (zt * y / r2).abs()));
        }
    }
}
