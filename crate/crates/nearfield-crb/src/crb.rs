//! Fisher information and Cramér-Rao bounds for an arbitrary terminal position.
//!
//! For the vector field, $[I]_{mn} = 2\,\mathrm{SNR}(\rho_{11}^{mn} + \rho_{12}^{mn})$,
//! where the two families collect the $k_0^2$-weighted far-field part and the
//! near-field remainder of $\operatorname{Re}\sum_\kappa \partial_n h_\kappa\,\partial_m h_\kappa^*$.
//! The scalar field uses $\rho_{21}, \rho_{22}$ in the same way; the overall
//! scalar field is a single complex observation, so its FIM is the real part
//! of a rank-one outer product.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::Serialize;

use crate::error::{CrbError, Result};
use crate::fields::{osef_gradient, sef_grad_rel, vef_grad_rel};
use crate::geometry::{FieldModel, PhysicalConfig, SurfaceGeometry, TerminalPosition};
use crate::quadrature::{integrate_2d, QuadratureSpec, RectDomain};

/// Relative singularity threshold used for inversion and identifiability.
pub const SINGULARITY_EPS: f64 = 1e-12;

/// Upper-triangle index order used by all six-entry tables.
pub const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

/// Quadrature and Riemann settings shared by every computation path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Numerics {
    pub quad: QuadratureSpec,
    /// Cell count of the Riemann grid for the overall scalar field.
    pub alpha: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self { quad: QuadratureSpec::default(), alpha: 201 * 201 }
    }
}

impl Numerics {
    pub fn with_alpha(mut self, alpha: usize) -> Self {
        self.alpha = alpha;
        self
    }
}

/// Real symmetric 3x3 Fisher information matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FimMatrix {
    pub m: [[f64; 3]; 3],
}

impl FimMatrix {
    pub fn zeros() -> Self {
        Self { m: [[0.0; 3]; 3] }
    }

    pub fn diagonal(d: [f64; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            m[i][i] = d[i];
        }
        Self { m }
    }

    /// Builds a symmetric matrix from the six upper-triangle entries in [`PAIRS`] order.
    pub fn from_upper(v: [f64; 6]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            m[i][j] = v[k];
            m[j][i] = v[k];
        }
        Self { m }
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn diag(&self) -> [f64; 3] {
        [self.m[0][0], self.m[1][1], self.m[2][2]]
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = *self;
        out.m.iter_mut().flatten().for_each(|a| *a *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] += other.m[i][j];
            }
        }
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0, |a, b| a.max(b.abs()))
    }

    /// Largest entrywise difference relative to the largest entry of `self`.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        d / self.max_abs()
    }

    pub fn asymmetry(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.m[i][j] - self.m[j][i]).abs());
            }
        }
        d / self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// Largest off-diagonal magnitude divided by the smallest diagonal entry.
    pub fn off_diagonal_ratio(&self) -> f64 {
        let off = [self.m[0][1], self.m[0][2], self.m[1][2]].iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let dmin = self.diag().iter().fold(f64::INFINITY, |a, &b| a.min(b));
        off / dmin
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        let e = SymmetricEigen::new(self.to_nalgebra());
        let mut v = [e.eigenvalues[0], e.eigenvalues[1], e.eigenvalues[2]];
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn is_psd(&self) -> bool {
        self.eigenvalues()[0] >= -SINGULARITY_EPS * self.trace().abs()
    }

    /// Numerical rank with eigenvalues below `SINGULARITY_EPS * max` counted as zero.
    pub fn rank(&self) -> usize {
        let ev = self.eigenvalues();
        let top = ev[2].abs();
        ev.iter().filter(|l| l.abs() > SINGULARITY_EPS * top).count()
    }

    /// Determinant expanded as $2I_{12}I_{13}I_{23} + I_{11}I_{22}I_{33} - I_{13}^2I_{22} - I_{11}I_{23}^2 - I_{12}^2I_{33}$.
    pub fn i_sum(&self) -> f64 {
        let m = &self.m;
        2.0 * m[0][1] * m[0][2] * m[1][2] + m[0][0] * m[1][1] * m[2][2]
            - m[0][2] * m[0][2] * m[1][1]
            - m[0][0] * m[1][2] * m[1][2]
            - m[0][1] * m[0][1] * m[2][2]
    }

    pub fn to_nalgebra(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.m[i][j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InversionMode {
    FullInvert,
    PerComponent,
}

/// How a bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrbPath {
    GeneralFullInvert,
    GeneralPerComponent,
    CplNormalized,
    CplLargeDistance,
    Asymptotic,
    Simo,
    SimoLargeDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrbResult {
    /// Variances in m², `+inf` when the coordinate is not identifiable.
    pub crb: [f64; 3],
    pub model: FieldModel,
    pub path: CrbPath,
    pub rank_deficient: bool,
    pub warnings: Vec<String>,
}

impl CrbResult {
    pub fn new(crb: [f64; 3], model: FieldModel, path: CrbPath) -> Self {
        Self { crb, model, path, rank_deficient: false, warnings: Vec::new() }
    }

    /// Root CRB in centimetres.
    pub fn rcrb_cm(&self) -> [f64; 3] {
        self.crb.map(|c| 100.0 * c.sqrt())
    }

    pub fn identifiable(&self) -> [bool; 3] {
        self.crb.map(|c| c.is_finite())
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.crb = out.crb.map(|c| c * s);
        out
    }
}

/// Fisher integrals for a general position, each in [`PAIRS`] order.
///
/// `first` already carries the $k_0^2$ factor, so the FIM is
/// `2 * SNR * (first + second)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoGeneralTable {
    pub model: FieldModel,
    pub first: [f64; 6],
    pub second: [f64; 6],
    pub error: f64,
}

impl RhoGeneralTable {
    pub fn get(&self, family: usize, m: usize, n: usize) -> f64 {
        let (m, n) = if m <= n { (m, n) } else { (n, m) };
        let k = PAIRS.iter().position(|&p| p == (m, n)).expect("index pair in range");
        match family {
            1 => self.first[k],
            2 => self.second[k],
            _ => panic!("family must be 1 or 2"),
        }
    }

    pub fn fim(&self, snr: f64) -> FimMatrix {
        let mut v = [0.0; 6];
        for k in 0..6 {
            v[k] = 2.0 * snr * (self.first[k] + self.second[k]);
        }
        FimMatrix::from_upper(v)
    }
}

pub(crate) fn vef_rho_integrand(x: f64, y: f64, z: f64, k2: f64) -> [f64; 12] {
    let (xx, yy, zz) = (x * x, y * y, z * z);
    let r2 = xx + yy + zz;
    let r6 = r2 * r2 * r2;
    let r8 = r6 * r2;
    let f = xx + zz;
    let a = k2 * f / r6;
    [
        a * xx,
        a * yy,
        a * zz,
        a * x * y,
        -a * x * z,
        -a * y * z,
        ((xx + yy) * r2 - 3.0 * xx * yy) / r8,
        f * (f + 4.0 * yy) / r8,
        (yy * (r2 - 2.0 * zz) + zz * (zz + xx)) / r8,
        x * y * (xx - 2.0 * yy + zz) / r8,
        x * z * (2.0 * yy - xx - zz) / r8,
        y * z * (2.0 * yy - xx - zz) / r8,
    ]
}

pub(crate) fn sef_rho_integrand(x: f64, y: f64, z: f64, k2: f64) -> [f64; 12] {
    let (xx, yy, zz) = (x * x, y * y, z * z);
    let r2 = xx + yy + zz;
    let r = r2.sqrt();
    let r4 = r2 * r2;
    let r7 = r4 * r2 * r;
    let r9 = r7 * r2;
    let f = xx + zz;
    let f3 = (xx + 3.0 * zz) * r4;
    let f5 = 5.0 * (xx + 5.0 * zz) * r2 / 2.0;
    let a = k2 * f / r7;
    let t33 = xx * (r2 - 2.0 * zz) + zz * (3.0 * yy - 2.0 * zz);
    [
        a * z * xx,
        a * z * yy,
        a * z * zz,
        a * z * x * y,
        -a * zz * x,
        -a * zz * y,
        z * xx * (25.0 * f / 4.0 - 5.0 * r2 + r4 / f) / r9,
        25.0 * z * yy * f / (4.0 * r9),
        t33 * t33 / (4.0 * z * f * r9),
        z * x * y * (25.0 * f / 4.0 - 5.0 * r2 / 2.0) / r9,
        x * (f5 * f - f3 - 25.0 * zz * f * f / 2.0) / (2.0 * f * r9),
        5.0 * y * (f3 / r2 - 5.0 * zz * f) / (4.0 * r9),
    ]
}

fn check_pointwise(model: FieldModel) -> Result<()> {
    if model == FieldModel::Osef {
        return Err(CrbError::Unsupported("the overall scalar field has no pointwise integrand".into()));
    }
    Ok(())
}

/// The twelve general-position integrals over the aperture.
pub fn rho_general(
    p_t: &TerminalPosition,
    geom: &SurfaceGeometry,
    cfg: &PhysicalConfig,
    model: FieldModel,
    quad: &QuadratureSpec,
) -> Result<RhoGeneralTable> {
    check_pointwise(model)?;
    let k2 = cfg.wave_number().powi(2);
    let (xt, yt, z) = (p_t.x, p_t.y, p_t.z);
    let dom = RectDomain::aperture(geom);
    let res = match model {
        FieldModel::Vef => integrate_2d(|u, v| vef_rho_integrand(u - xt, v - yt, z, k2), &dom, quad)?,
        _ => integrate_2d(|u, v| sef_rho_integrand(u - xt, v - yt, z, k2), &dom, quad)?,
    };
    let mut first = [0.0; 6];
    let mut second = [0.0; 6];
    first.copy_from_slice(&res.value[..6]);
    second.copy_from_slice(&res.value[6..]);
    Ok(RhoGeneralTable { model, first, second, error: res.error })
}

pub fn fim_vef(p_t: &TerminalPosition, geom: &SurfaceGeometry, cfg: &PhysicalConfig, quad: &QuadratureSpec) -> Result<FimMatrix> {
    Ok(rho_general(p_t, geom, cfg, FieldModel::Vef, quad)?.fim(cfg.snr()))
}

pub fn fim_sef(p_t: &TerminalPosition, geom: &SurfaceGeometry, cfg: &PhysicalConfig, quad: &QuadratureSpec) -> Result<FimMatrix> {
    Ok(rho_general(p_t, geom, cfg, FieldModel::Sef, quad)?.fim(cfg.snr()))
}

/// Definitional FIM $2\,\mathrm{SNR}\iint \operatorname{Re}\{\partial_m h\,\partial_n h^*\}$ from the analytic gradients.
pub fn fim_from_gradients(
    p_t: &TerminalPosition,
    geom: &SurfaceGeometry,
    cfg: &PhysicalConfig,
    model: FieldModel,
    quad: &QuadratureSpec,
) -> Result<FimMatrix> {
    check_pointwise(model)?;
    let k = cfg.wave_number();
    let (xt, yt, z) = (p_t.x, p_t.y, p_t.z);
    let dom = RectDomain::aperture(geom);
    let res = match model {
        FieldModel::Vef => integrate_2d(
            |u, v| {
                let g = vef_grad_rel(u - xt, v - yt, z, k);
                PAIRS.map(|(m, n)| (0..3).map(|c| (g[c][m] * g[c][n].conj()).re).sum::<f64>())
            },
            &dom,
            quad,
        )?,
        _ => integrate_2d(
            |u, v| {
                let g = sef_grad_rel(u - xt, v - yt, z, k);
                PAIRS.map(|(m, n)| (g[m] * g[n].conj()).re)
            },
            &dom,
            quad,
        )?,
    };
    Ok(FimMatrix::from_upper(res.value.map(|v| 2.0 * cfg.snr() * v)))
}

/// FIM of the discretised overall scalar field; rank at most two.
pub fn fim_osef(p_t: &TerminalPosition, geom: &SurfaceGeometry, cfg: &PhysicalConfig, alpha: usize) -> Result<FimMatrix> {
    let unit = PhysicalConfig::new(cfg.wavelength(), cfg.snr())?;
    let g = osef_gradient(p_t, geom, &unit, alpha)?;
    Ok(FimMatrix::from_upper(PAIRS.map(|(m, n)| 2.0 * cfg.snr() * (g[m] * g[n].conj()).re)))
}

fn per_component(fim: &FimMatrix) -> [f64; 3] {
    let tr = fim.trace();
    fim.diag().map(|d| if tr > 0.0 && d > SINGULARITY_EPS * tr { 1.0 / d } else { f64::INFINITY })
}

fn pseudo_inverse_diag(fim: &FimMatrix) -> [f64; 3] {
    let e = SymmetricEigen::new(fim.to_nalgebra());
    let top = e.eigenvalues.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let mut null_weight = 0.0;
        let mut acc = 0.0;
        for k in 0..3 {
            let lam = e.eigenvalues[k];
            let w = e.eigenvectors[(i, k)].powi(2);
            if lam > SINGULARITY_EPS * top {
                acc += w / lam;
            } else {
                null_weight += w;
            }
        }
        *o = if top <= 0.0 || null_weight > 1e-8 { f64::INFINITY } else { acc };
    }
    out
}

/// Diagonal of the inverse FIM.
///
/// Full inversion uses cofactors over the expanded determinant and falls
/// back to an eigen-decomposition when the determinant is below
/// `SINGULARITY_EPS * trace^3`; coordinates outside the range of the FIM
/// are reported as `+inf`.
pub fn crb_from_fim(fim: &FimMatrix, mode: InversionMode) -> [f64; 3] {
    match mode {
        InversionMode::PerComponent => per_component(fim),
        InversionMode::FullInvert => {
            let m = &fim.m;
            let tr = fim.trace();
            let det = fim.i_sum();
            if tr > 0.0 && det > SINGULARITY_EPS * tr.powi(3) {
                let c = [
                    m[1][1] * m[2][2] - m[1][2] * m[1][2],
                    m[0][0] * m[2][2] - m[0][2] * m[0][2],
                    m[0][0] * m[1][1] - m[0][1] * m[0][1],
                ];
                if c.iter().all(|&v| v > 0.0) {
                    return c.map(|v| v / det);
                }
            }
            pseudo_inverse_diag(fim)
        }
    }
}

/// CRBs at an arbitrary terminal position.
pub fn crb_point(
    p_t: &TerminalPosition,
    geom: &SurfaceGeometry,
    cfg: &PhysicalConfig,
    model: FieldModel,
    numerics: &Numerics,
) -> Result<CrbResult> {
    let out = match model {
        FieldModel::Vef | FieldModel::Sef => {
            let fim = rho_general(p_t, geom, cfg, model, &numerics.quad)?.fim(cfg.snr());
            CrbResult::new(crb_from_fim(&fim, InversionMode::FullInvert), model, CrbPath::GeneralFullInvert)
        }
        FieldModel::Osef => {
            let fim = fim_osef(p_t, geom, cfg, numerics.alpha)?;
            let mut r = CrbResult::new(crb_from_fim(&fim, InversionMode::PerComponent), model, CrbPath::GeneralPerComponent);
            r.rank_deficient = true;
            if !p_t.is_cpl() {
                r.warnings.push(format!(
                    "overall scalar field FIM has rank {}; per-component bounds assume the other coordinates known",
                    fim.rank()
                ));
            }
            r
        }
    };
    if out.crb.iter().any(|c| c.is_nan()) {
        return Err(CrbError::Numerical { message: "CRB evaluated to NaN".into(), location: None });
    }
    Ok(out)
}
