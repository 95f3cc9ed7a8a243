//! Distributed receivers: $N_s^2$ equal square antennas with independent
//! observations and total area $D_r^2/2$.
//!
//! Antenna $(i, j)$ of the first quadrant covers
//! $x_r \in [(2i-1)R_r - D_r,\ (2i-1)R_r + D_r] / (2\sqrt2 N_s)$ and likewise
//! in $y_r$. The other three quadrants are mirror images. For a terminal on
//! the CPL each mirror image carries the same Fisher diagonal and the
//! off-diagonal terms cancel, so one quadrant times four gives the full FIM.

use serde::Serialize;

use crate::cpl::{crb_cpl, rho_values_on, CplScenario, LARGE_DISTANCE_WAVELENGTHS};
use crate::crb::{crb_from_fim, sef_rho_integrand, vef_rho_integrand, CrbPath, CrbResult, FimMatrix, InversionMode, Numerics, PAIRS};
use crate::error::{CrbError, Result};
use crate::fields::osef_gradient_on;
use crate::geometry::{FieldModel, PhysicalConfig, SurfaceGeometry, TerminalPosition};
use crate::quadrature::{integrate_2d, RectDomain};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Antenna {
    /// 1-based quadrant indices.
    pub i: usize,
    pub j: usize,
    /// Mirror signs; `(1, 1)` is the first quadrant.
    pub sx: i8,
    pub sy: i8,
    /// Surface coordinates in metres.
    pub raw: RectDomain,
    /// Surface coordinates divided by $z_t$.
    pub normalized: RectDomain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimoLayout {
    pub n_s: usize,
    pub r_r: f64,
    pub d_r: f64,
    pub z_t: f64,
    pub antennas: Vec<Antenna>,
    /// Set when $D_r > R_r$ and neighbouring antennas overlap.
    pub overlapping: bool,
}

pub fn build_layout(n_s: usize, r_r: f64, d_r: f64, z_t: f64) -> Result<SimoLayout> {
    if n_s == 0 || (n_s != 1 && n_s % 2 != 0) {
        return Err(CrbError::config(format!("n_s must be 1 or a positive even integer, got {n_s}")));
    }
    for (name, v) in [("r_r", r_r), ("d_r", d_r), ("z_t", z_t)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CrbError::domain(format!("{name} must be positive, got {v}")));
        }
    }
    let mut antennas = Vec::new();
    if n_s == 1 {
        let raw = RectDomain::aperture(&SurfaceGeometry::new(d_r)?);
        antennas.push(Antenna { i: 1, j: 1, sx: 1, sy: 1, raw, normalized: raw.scaled(1.0 / z_t) });
    } else {
        let den = 2.0 * 2f64.sqrt() * n_s as f64;
        let span = |i: usize| (((2 * i - 1) as f64 * r_r - d_r) / den, ((2 * i - 1) as f64 * r_r + d_r) / den);
        for (sx, sy) in [(1i8, 1i8), (-1, 1), (-1, -1), (1, -1)] {
            for j in 1..=n_s / 2 {
                for i in 1..=n_s / 2 {
                    let (u0, u1) = span(i);
                    let (v0, v1) = span(j);
                    let (u0, u1) = if sx > 0 { (u0, u1) } else { (-u1, -u0) };
                    let (v0, v1) = if sy > 0 { (v0, v1) } else { (-v1, -v0) };
                    let raw = RectDomain::new(u0, u1, v0, v1)?;
                    antennas.push(Antenna { i, j, sx, sy, raw, normalized: raw.scaled(1.0 / z_t) });
                }
            }
        }
    }
    Ok(SimoLayout { n_s, r_r, d_r, z_t, antennas, overlapping: n_s > 1 && d_r > r_r })
}

impl SimoLayout {
    /// Layout for a terminal, which must lie on the CPL.
    pub fn for_terminal(n_s: usize, r_r: f64, d_r: f64, p_t: &TerminalPosition) -> Result<Self> {
        if !p_t.is_cpl() {
            return Err(CrbError::config("SIMO bounds require a terminal on the CPL (x_t = y_t = 0)"));
        }
        build_layout(n_s, r_r, d_r, p_t.z)
    }

    pub fn quadrant(&self) -> impl Iterator<Item = &Antenna> {
        self.antennas.iter().filter(|a| a.sx > 0 && a.sy > 0)
    }

    /// Number of mirror images each first-quadrant antenna stands for.
    pub fn multiplicity(&self) -> f64 {
        if self.n_s == 1 { 1.0 } else { 4.0 }
    }

    pub fn total_area(&self) -> f64 {
        self.antennas.iter().map(|a| a.raw.area()).sum()
    }

    pub fn tau(&self) -> f64 {
        self.d_r / self.z_t
    }

    pub fn without(&self, index: usize) -> Self {
        let mut out = self.clone();
        out.antennas.remove(index);
        out
    }
}

fn quadrant_rho(layout: &SimoLayout, model: FieldModel, numerics: &Numerics) -> Result<([f64; 3], [f64; 3])> {
    let mut first = [0.0; 3];
    let mut second = [0.0; 3];
    for a in layout.quadrant() {
        let (v, _) = rho_values_on(model, &a.normalized, &numerics.quad)?;
        for k in 0..3 {
            first[k] += v[k];
            second[k] += v[k + 3];
        }
    }
    Ok((first, second))
}

fn osef_antenna_gradient(
    layout: &SimoLayout,
    a: &Antenna,
    cfg: &PhysicalConfig,
    alpha: usize,
) -> Result<[num_complex::Complex64; 3]> {
    let unit = PhysicalConfig::new(cfg.wavelength(), cfg.snr())?;
    let p_t = TerminalPosition::on_cpl(layout.z_t)?;
    osef_gradient_on(&p_t, &a.raw, 2f64.sqrt() / layout.d_r, &unit, alpha)
}

fn simo_result(info: [f64; 3], model: FieldModel, path: CrbPath) -> CrbResult {
    CrbResult::new(crb_from_fim(&FimMatrix::diagonal(info), InversionMode::PerComponent), model, path)
}

/// CRBs of the distributed receiver for a terminal at $(0, 0, z_t)$.
pub fn crb_simo(layout: &SimoLayout, cfg: &PhysicalConfig, model: FieldModel, numerics: &Numerics) -> Result<CrbResult> {
    let mult = layout.multiplicity();
    let info = match model {
        FieldModel::Osef => {
            let mut s = [0.0; 3];
            for a in layout.quadrant() {
                let g = osef_antenna_gradient(layout, a, cfg, numerics.alpha)?;
                for k in 0..3 {
                    s[k] += g[k].norm_sqr();
                }
            }
            s.map(|v| 2.0 * cfg.snr() * mult * v)
        }
        _ => {
            let (first, second) = quadrant_rho(layout, model, numerics)?;
            let k2 = cfg.wave_number().powi(2);
            let w = layout.z_t.powi(-2);
            std::array::from_fn(|k| 2.0 * cfg.snr() * mult * (k2 * first[k] + w * second[k]))
        }
    };
    let mut out = simo_result(info, model, CrbPath::Simo);
    out.rank_deficient = model == FieldModel::Osef && out.crb.iter().any(|c| c.is_infinite());
    if layout.overlapping {
        out.warnings.push(format!("antennas overlap because d_r = {} m exceeds r_r = {} m", layout.d_r, layout.r_r));
    }
    Ok(out)
}

/// [`crb_simo`] without the $z_t^{-2}$ terms.
pub fn crb_simo_large_zt(layout: &SimoLayout, cfg: &PhysicalConfig, model: FieldModel, numerics: &Numerics) -> Result<CrbResult> {
    if model == FieldModel::Osef {
        return Err(CrbError::Unsupported("no large-distance form for the overall scalar field".into()));
    }
    let (first, _) = quadrant_rho(layout, model, numerics)?;
    let k2 = cfg.wave_number().powi(2);
    let mult = layout.multiplicity();
    let mut out = simo_result(first.map(|f| 2.0 * cfg.snr() * mult * k2 * f), model, CrbPath::SimoLargeDistance);
    if layout.z_t < LARGE_DISTANCE_WAVELENGTHS * cfg.wavelength() {
        out.warnings.push(format!("z_t = {} m is below {} wavelengths", layout.z_t, LARGE_DISTANCE_WAVELENGTHS));
    }
    Ok(out)
}

/// Full 3x3 Fisher contribution of one antenna, from the raw-coordinate integrands.
pub fn antenna_fim(
    layout: &SimoLayout,
    a: &Antenna,
    cfg: &PhysicalConfig,
    model: FieldModel,
    numerics: &Numerics,
) -> Result<FimMatrix> {
    let snr = cfg.snr();
    let z = layout.z_t;
    let v = match model {
        FieldModel::Osef => {
            let g = osef_antenna_gradient(layout, a, cfg, numerics.alpha)?;
            PAIRS.map(|(m, n)| 2.0 * snr * (g[m] * g[n].conj()).re)
        }
        _ => {
            let k2 = cfg.wave_number().powi(2);
            let res = if model == FieldModel::Vef {
                integrate_2d(|x, y| vef_rho_integrand(x, y, z, k2), &a.raw, &numerics.quad)?
            } else {
                integrate_2d(|x, y| sef_rho_integrand(x, y, z, k2), &a.raw, &numerics.quad)?
            };
            std::array::from_fn(|k| 2.0 * snr * (res.value[k] + res.value[k + 6]))
        }
    };
    Ok(FimMatrix::from_upper(v))
}

/// Sum of [`antenna_fim`] over every antenna of the layout.
pub fn fim_full_layout(layout: &SimoLayout, cfg: &PhysicalConfig, model: FieldModel, numerics: &Numerics) -> Result<FimMatrix> {
    let mut total = FimMatrix::zeros();
    for a in &layout.antennas {
        total = total.add(&antenna_fim(layout, a, cfg, model, numerics)?);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Report {
    /// Largest relative spread of the Fisher diagonal among mirror partners.
    pub partner_max_rel_dev: f64,
    /// Largest off-diagonal of the full-layout FIM over its smallest diagonal.
    pub off_diagonal_ratio: f64,
    /// Relative difference between the full-layout diagonal and the quadrant shortcut.
    pub quadrant_rel_diff: f64,
    /// Off-diagonal ratio after deleting one antenna.
    pub negative_control_ratio: f64,
}

impl Lemma1Report {
    pub fn passes(&self, tol: f64) -> bool {
        self.partner_max_rel_dev < tol && self.off_diagonal_ratio < tol && self.negative_control_ratio > 1e3 * tol
    }
}

/// Checks the mirror symmetry that justifies the one-quadrant shortcut.
pub fn lemma1_check(layout: &SimoLayout, cfg: &PhysicalConfig, model: FieldModel, numerics: &Numerics) -> Result<Lemma1Report> {
    if layout.n_s < 2 {
        return Err(CrbError::config("the symmetry check needs n_s >= 2"));
    }
    let fims = layout
        .antennas
        .iter()
        .map(|a| antenna_fim(layout, a, cfg, model, numerics))
        .collect::<Result<Vec<_>>>()?;
    let mut partner_max_rel_dev: f64 = 0.0;
    for (q, a) in layout.antennas.iter().enumerate().filter(|(_, a)| a.sx > 0 && a.sy > 0) {
        let base = fims[q].diag();
        for (p, b) in layout.antennas.iter().enumerate() {
            if b.i == a.i && b.j == a.j {
                let d = fims[p].diag();
                for k in 0..3 {
                    let scale = base[k].abs().max(f64::MIN_POSITIVE);
                    partner_max_rel_dev = partner_max_rel_dev.max((d[k] - base[k]).abs() / scale);
                }
            }
        }
    }
    let total = fims.iter().fold(FimMatrix::zeros(), |acc, f| acc.add(f));
    let shortcut = quadrant_diag(layout, cfg, model, numerics)?;
    let full = total.diag();
    let quadrant_rel_diff = (0..3).map(|k| (full[k] - shortcut[k]).abs() / full[k].abs()).fold(0.0, f64::max);
    let control = fims[1..].iter().fold(FimMatrix::zeros(), |acc, f| acc.add(f));
    Ok(Lemma1Report {
        partner_max_rel_dev,
        off_diagonal_ratio: total.off_diagonal_ratio(),
        quadrant_rel_diff,
        negative_control_ratio: control.off_diagonal_ratio(),
    })
}

fn quadrant_diag(layout: &SimoLayout, cfg: &PhysicalConfig, model: FieldModel, numerics: &Numerics) -> Result<[f64; 3]> {
    let r = crb_simo(layout, cfg, model, numerics)?;
    Ok(r.crb.map(|c| if c.is_finite() { 1.0 / c } else { 0.0 }))
}

/// Diagonal of a single centred antenna whose `x` bound matches the layout's.
///
/// Returns the equivalent aperture diagonal found by bisection on $\log D_r$.
pub fn equivalent_siso_aperture(
    layout: &SimoLayout,
    cfg: &PhysicalConfig,
    model: FieldModel,
    numerics: &Numerics,
    coordinate: usize,
) -> Result<f64> {
    let target = crb_simo(layout, cfg, model, numerics)?.crb[coordinate];
    let siso = |d: f64| -> Result<f64> {
        let sc = CplScenario::from_aperture(d, layout.z_t, *cfg, model)?;
        Ok(crb_cpl(&sc, numerics)?.crb[coordinate])
    };
    let (mut lo, mut hi) = (1e-4f64.ln(), 1e4f64.ln());
    if !(siso(lo.exp())? >= target && siso(hi.exp())? <= target) {
        return Err(CrbError::Numerical { message: "no equivalent aperture in [1e-4, 1e4] m".into(), location: None });
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if siso(mid.exp())? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crb::crb_point;
    use proptest::prelude::*;

    fn cfg() -> PhysicalConfig {
        PhysicalConfig::new(0.001, 10.0).unwrap()
    }

    fn numerics() -> Numerics {
        Numerics::default().with_alpha(21 * 21)
    }

    #[test]
    fn layout_example() {
        let l = build_layout(2, 30.0, 6.0, 6.0).unwrap();
        let a = l.quadrant().next().unwrap();
        assert!((a.raw.u_min - 4.242640687).abs() < 1e-8);
        assert!((a.raw.u_max - 6.363961031).abs() < 1e-8);
        assert_eq!(l.antennas.len(), 4);
        assert!(!l.overlapping);
        assert!(build_layout(2, 3.0, 6.0, 6.0).unwrap().overlapping);
    }

    #[test]
    fn siso_layout_is_the_aperture() {
        let l = build_layout(1, 1.0, 3.0, 6.0).unwrap();
        assert_eq!(l.antennas.len(), 1);
        assert_eq!(l.antennas[0].raw, RectDomain::aperture(&SurfaceGeometry::new(3.0).unwrap()));
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(build_layout(3, 30.0, 6.0, 6.0).is_err());
        assert!(build_layout(0, 30.0, 6.0, 6.0).is_err());
        assert!(build_layout(2, 30.0, -6.0, 6.0).is_err());
        let off = TerminalPosition::new(1.0, 0.0, 6.0).unwrap();
        assert!(matches!(SimoLayout::for_terminal(2, 30.0, 6.0, &off), Err(CrbError::Config(_))));
    }

    #[test]
    fn siso_degeneration() {
        let c = PhysicalConfig::new(0.01, 10.0).unwrap();
        let n = numerics();
        let l = build_layout(1, 30.0, 3.0, 6.0).unwrap();
        for model in [FieldModel::Vef, FieldModel::Sef] {
            let a = crb_simo(&l, &c, model, &n).unwrap().crb;
            let b = crb_cpl(&CplScenario::from_aperture(3.0, 6.0, c, model).unwrap(), &n).unwrap().crb;
            for k in 0..3 {
                assert!((a[k] / b[k] - 1.0).abs() < 1e-10);
            }
        }
        let a = crb_simo(&l, &c, FieldModel::Osef, &n).unwrap().crb;
        let geom = SurfaceGeometry::new(3.0).unwrap();
        let b = crb_point(&TerminalPosition::on_cpl(6.0).unwrap(), &geom, &c, FieldModel::Osef, &n).unwrap().crb;
        assert!((a[2] / b[2] - 1.0).abs() < 1e-10);
        assert!(a[0].is_infinite() && b[0].is_infinite());
    }

    #[test]
    fn lemma1_symmetry_and_negative_control() {
        let l = build_layout(4, 30.0, 6.0, 6.0).unwrap();
        for model in FieldModel::ALL {
            let r = lemma1_check(&l, &cfg(), model, &numerics()).unwrap();
            assert!(r.passes(1e-10), "{model}: {r:?}");
            assert!(r.quadrant_rel_diff < 1e-8, "{model}: {r:?}");
        }
    }

    #[test]
    fn fisher_information_is_additive() {
        let l = build_layout(2, 30.0, 6.0, 6.0).unwrap();
        let total = fim_full_layout(&l, &cfg(), FieldModel::Sef, &numerics()).unwrap();
        let mut parts = FimMatrix::zeros();
        for a in &l.antennas {
            parts = parts.add(&antenna_fim(&l, a, &cfg(), FieldModel::Sef, &numerics()).unwrap());
        }
        assert!(total.rel_diff(&parts) < 1e-12);
    }

    #[test]
    fn large_tau_ratio_approaches_inverse_antenna_count() {
        for n_s in [2usize, 4] {
            let l = build_layout(n_s, 30.0, 6000.0, 6.0).unwrap();
            let n = numerics();
            let m = crb_simo(&l, &cfg(), FieldModel::Sef, &n).unwrap().crb;
            let c = crb_cpl(&CplScenario::from_aperture(6000.0, 6.0, cfg(), FieldModel::Sef).unwrap(), &n).unwrap().crb;
            for k in 0..3 {
                let ratio = m[k] / c[k] * (n_s * n_s) as f64;
                assert!((ratio - 1.0).abs() < 0.05, "n_s={n_s} k={k} ratio={ratio}");
            }
        }
    }

    #[test]
    fn distributed_antennas_trade_z_for_x_and_y() {
        let n = numerics();
        for d in [0.5, 1.0, 3.0, 9.0] {
            let l = build_layout(2, 30.0, d, 6.0).unwrap();
            let m = crb_simo(&l, &cfg(), FieldModel::Vef, &n).unwrap().crb;
            let c = crb_cpl(&CplScenario::from_aperture(d, 6.0, cfg(), FieldModel::Vef).unwrap(), &n).unwrap().crb;
            assert!(m[0] < c[0] && m[1] < c[1]);
            let db = 10.0 * (m[2] / c[2]).log10();
            assert!((3.0..=20.0).contains(&db), "d={d} z gap {db} dB");
        }
    }

    #[test]
    fn small_layout_equivalent_to_large_single_aperture() {
        let l = build_layout(2, 30.0, 0.1, 6.0).unwrap();
        let d = equivalent_siso_aperture(&l, &cfg(), FieldModel::Vef, &numerics(), 0).unwrap();
        assert!((d / 0.9 - 1.0).abs() < 0.15, "{d}");
    }

    #[test]
    fn large_distance_form_keeps_ordering() {
        let l = build_layout(2, 30.0, 3.0, 6.0).unwrap();
        let n = numerics();
        let v = crb_simo_large_zt(&l, &cfg(), FieldModel::Vef, &n).unwrap().crb;
        let s = crb_simo_large_zt(&l, &cfg(), FieldModel::Sef, &n).unwrap().crb;
        let o = crb_simo(&l, &cfg(), FieldModel::Osef, &Numerics::default().with_alpha(61 * 61)).unwrap().crb;
        let full = crb_simo(&l, &cfg(), FieldModel::Vef, &n).unwrap().crb;
        for k in 0..3 {
            assert!(v[k] < s[k] && s[k] <= o[k], "k={k} {v:?} {s:?} {o:?}");
            assert!((v[k] / full[k] - 1.0).abs() < 1e-3);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn total_area_is_invariant(half_ns in 1usize..5, r_r in 1.0f64..50.0, d_r in 0.1f64..60.0) {
            let n_s = 2 * half_ns;
            let l = build_layout(n_s, r_r, d_r, 5.0).unwrap();
            prop_assert_eq!(l.antennas.len(), n_s * n_s);
            prop_assert!((l.total_area() / (d_r * d_r / 2.0) - 1.0).abs() < 1e-12);
            prop_assert_eq!(l.overlapping, d_r > r_r);
        }

        #[test]
        fn layout_is_rotation_invariant(half_ns in 1usize..4, r_r in 1.0f64..50.0, d_r in 0.1f64..60.0) {
            let l = build_layout(2 * half_ns, r_r, d_r, 5.0).unwrap();
            for a in &l.antennas {
                let d = a.raw;
                let (cx, cy) = (0.5 * (d.u_min + d.u_max), 0.5 * (d.v_min + d.v_max));
                let hit = l.antennas.iter().any(|b| {
                    let (bx, by) = (0.5 * (b.raw.u_min + b.raw.u_max), 0.5 * (b.raw.v_min + b.raw.v_max));
                    (bx + cy).abs() < 1e-12 * r_r && (by - cx).abs() < 1e-12 * r_r
                });
                prop_assert!(hit);
            }
        }

        #[test]
        fn disjoint_when_spread_out(half_ns in 1usize..4, r_r in 1.0f64..50.0, frac in 0.05f64..1.0) {
            let l = build_layout(2 * half_ns, r_r, frac * r_r, 5.0).unwrap();
            for (p, a) in l.antennas.iter().enumerate() {
                for b in &l.antennas[p + 1..] {
                    let ox = a.raw.u_max.min(b.raw.u_max) - a.raw.u_min.max(b.raw.u_min);
                    let oy = a.raw.v_max.min(b.raw.v_max) - a.raw.v_min.max(b.raw.v_min);
                    prop_assert!(ox <= 1e-12 * r_r || oy <= 1e-12 * r_r);
                }
            }
        }
    }
}
