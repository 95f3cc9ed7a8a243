//! Oracle groups: finite differences, dual FIM paths, CPL consistency,
//! closed forms, disk bounds, large-distance inequalities, ordering,
//! scaling and mirror symmetry. Every group is deterministic.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cpl::{crb_cpl, crb_cpl_large_zt, large_distance_ratios, rho_closed_form, rho_numeric, ClosedFormStatus, CplScenario};
use crate::crb::{crb_point, fim_from_gradients, rho_general, Numerics};
use crate::error::Result;
use crate::fields::{sef, sef_gradient, vef, vef_gradient};
use crate::geometry::{FieldModel, PhysicalConfig, SurfaceGeometry, SurfacePoint, TerminalPosition};
use crate::quadrature::QuadratureSpec;
use crate::simo::{build_layout, lemma1_check};

/// The $\tau$ values used by the closed-form and bound groups.
pub const TAU_GRID: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupResult {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub notes: Vec<String>,
}

impl GroupResult {
    fn new(name: &str, samples: usize, max_deviation: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: max_deviation <= tolerance, samples, max_deviation, tolerance, notes: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub groups: Vec<GroupResult>,
}

pub fn run_all() -> Result<ValidationReport> {
    let groups = vec![
        gradient_oracle(100)?,
        fim_dual_path(50)?,
        cpl_consistency()?,
        closed_forms()?,
        disk_bounds()?,
        large_distance()?,
        ordering()?,
        scaling()?,
        mirror_symmetry()?,
    ];
    Ok(ValidationReport { passed: groups.iter().all(|g| g.passed), groups })
}

fn central_diff<F>(f: F, p: &TerminalPosition, n: usize, h: f64) -> Result<Vec<Complex64>>
where
    F: Fn(&TerminalPosition) -> Result<Vec<Complex64>>,
{
    let mut a = p.as_array();
    let mut b = a;
    a[n] += h;
    b[n] -= h;
    let fa = f(&TerminalPosition::new(a[0], a[1], a[2])?)?;
    let fb = f(&TerminalPosition::new(b[0], b[1], b[2])?)?;
    Ok(fa.iter().zip(&fb).map(|(x, y)| (x - y) / (2.0 * h)).collect())
}

/// Analytic field gradients against central differences with step $10^{-6} r$.
///
/// The error of each configuration is measured against its largest gradient entry.
pub fn gradient_oracle(configs: usize) -> Result<GroupResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6772_6164);
    let mut worst: f64 = 0.0;
    for _ in 0..configs {
        let p_r = SurfacePoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let p_t = TerminalPosition::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.2..8.0))?;
        let cfg = PhysicalConfig::new(rng.gen_range(0.1..1.0), 1.0)?;
        let r = ((p_r.x - p_t.x).powi(2) + (p_r.y - p_t.y).powi(2) + p_t.z.powi(2)).sqrt();
        let h = 1e-6 * r;
        let g = vef_gradient(p_r, &p_t, &cfg)?;
        let s = sef_gradient(p_r, &p_t, &cfg)?;
        let vscale = g.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let sscale = s.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for n in 0..3 {
            let fd = central_diff(|p| Ok(vef(p_r, p, &cfg)?.as_array().to_vec()), &p_t, n, h)?;
            for k in 0..3 {
                worst = worst.max((fd[k] - g[k][n]).norm() / vscale);
            }
            let fd = central_diff(|p| Ok(vec![sef(p_r, p, &cfg)?]), &p_t, n, h)?;
            worst = worst.max((fd[0] - s[n]).norm() / sscale);
        }
    }
    Ok(GroupResult::new("gradient-finite-difference", configs, worst, 1e-6))
}

/// Closed-form integrand FIM against the gradient outer-product FIM.
pub fn fim_dual_path(configs: usize) -> Result<GroupResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6475_616c);
    let quad = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    for i in 0..configs {
        let geom = SurfaceGeometry::new(rng.gen_range(0.5..5.0))?;
        let p_t = TerminalPosition::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.5..8.0))?;
        let cfg = PhysicalConfig::new(rng.gen_range(0.005..0.2), rng.gen_range(0.1..100.0))?;
        let model = if i % 2 == 0 { FieldModel::Vef } else { FieldModel::Sef };
        let a = rho_general(&p_t, &geom, &cfg, model, &quad)?.fim(cfg.snr());
        let b = fim_from_gradients(&p_t, &geom, &cfg, model, &quad)?;
        worst = worst.max(a.rel_diff(&b));
    }
    Ok(GroupResult::new("fim-integrand-vs-gradient", configs, worst, 1e-8))
}

/// Scenarios `(tau, z_t, lambda)` used by the CPL consistency group.
pub fn cpl_scenarios() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for (i, tau) in [0.05, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 15.0, 30.0, 60.0].iter().enumerate() {
        for (z, lam) in [(6.0, 0.01), (1.5, 0.05)] {
            out.push((*tau, z * (1.0 + 0.1 * i as f64), lam));
        }
    }
    out
}

/// Normalised-coordinate CPL bounds against the general-position engine.
pub fn cpl_consistency() -> Result<GroupResult> {
    let numerics = Numerics::default();
    let mut worst: f64 = 0.0;
    let scenarios = cpl_scenarios();
    for &(tau, z, lam) in &scenarios {
        let cfg = PhysicalConfig::new(lam, 10.0)?;
        for model in [FieldModel::Vef, FieldModel::Sef] {
            let sc = CplScenario::new(tau, z, cfg, model)?;
            let a = crb_cpl(&sc, &numerics)?.crb;
            let b = crb_point(&TerminalPosition::on_cpl(z)?, &sc.geometry()?, &cfg, model, &numerics)?.crb;
            for k in 0..3 {
                worst = worst.max((a[k] / b[k] - 1.0).abs());
            }
        }
    }
    Ok(GroupResult::new("cpl-vs-general-engine", scenarios.len(), worst, 1e-8))
}

/// Printed closed forms against quadrature.
///
/// Passes when three forms agree and the fourth is flagged as a mismatch
/// while the table keeps the quadrature value.
pub fn closed_forms() -> Result<GroupResult> {
    let quad = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut mismatch_handled = true;
    let mut x_dev: f64 = 0.0;
    for tau in TAU_GRID {
        let t = rho_numeric(tau, FieldModel::Vef, &quad)?;
        for e in [t.second[1], t.first[2], t.second[2]] {
            let cf = e.closed_form.expect("vector-field table carries closed forms");
            worst = worst.max(cf.rel_diff);
        }
        let x = t.second[0];
        let cf = x.closed_form.expect("vector-field table carries closed forms");
        x_dev = x_dev.max(cf.rel_diff);
        let printed = rho_closed_form(tau)?.rho12x;
        mismatch_handled &= cf.status == ClosedFormStatus::PrintedFormMismatch && x.value == cf.numeric && x.value != printed;
    }
    let mut g = GroupResult::new("closed-forms", TAU_GRID.len() * 4, worst, 1e-7);
    g.passed &= mismatch_handled;
    g.notes.push(format!(
        "rho12x: documented mismatch{}; printed form deviates by up to {:.3e} relative and quadrature is kept",
        if mismatch_handled { "" } else { " NOT handled" },
        x_dev
    ));
    Ok(g)
}

/// Every printed disk bound brackets quadrature.
pub fn disk_bounds() -> Result<GroupResult> {
    let quad = QuadratureSpec::default();
    let mut violation: f64 = 0.0;
    let mut count = 0;
    for model in [FieldModel::Vef, FieldModel::Sef] {
        for tau in TAU_GRID {
            for (_, e) in rho_numeric(tau, model, &quad)?.entries() {
                if let Some((lo, hi)) = e.bounds {
                    count += 1;
                    violation = violation.max((lo - e.value) / e.value).max((e.value - hi) / e.value);
                }
            }
        }
    }
    Ok(GroupResult::new("disk-bounds", count, violation.max(0.0), 0.0))
}

/// Large-distance inequalities: the $k_0^2$ term dominates by at least
/// $10^3$ for $z_t \ge 100\lambda$ with $D_r \ge 50\lambda$, the simplified bound is within 0.1% at
/// $z_t = 1000\lambda$ and $\min_\tau(\rho_{11y} - \rho_{12y}) > -2.34$.
pub fn large_distance() -> Result<GroupResult> {
    let numerics = Numerics::default();
    let mut min_ratio = f64::INFINITY;
    let mut worst_simplified: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    let mut samples = 0;
    for tau in [0.05f64, 0.5, 2.0, 10.0, 20.0] {
        for lam in [0.01, 0.001] {
            for model in [FieldModel::Vef, FieldModel::Sef] {
                let cfg = PhysicalConfig::new(lam, 10.0)?;
                let z = 100.0 * lam * (0.5 / tau).max(1.0);
                let sc = CplScenario::new(tau, z, cfg, model)?;
                min_ratio = min_ratio.min(large_distance_ratios(&sc, &numerics.quad)?.into_iter().fold(f64::INFINITY, f64::min));
                let far = CplScenario::new(tau, 1000.0 * lam, cfg, model)?;
                let full = crb_cpl(&far, &numerics)?.crb;
                let simple = crb_cpl_large_zt(&far, &numerics)?.crb;
                for k in 0..3 {
                    worst_simplified = worst_simplified.max((simple[k] / full[k] - 1.0).abs());
                }
                samples += 1;
            }
        }
        let t = rho_numeric(tau, FieldModel::Vef, &numerics.quad)?;
        min_gap = min_gap.min(t.first[1].value - t.second[1].value);
    }
    let dev = (1e3 / min_ratio).max(worst_simplified / 1e-3).max(if min_gap > -2.34 { 0.0 } else { f64::INFINITY });
    let mut g = GroupResult::new("large-distance-inequalities", samples, dev, 1.0);
    g.notes.push(format!("min dominance ratio {min_ratio:.3e} (needs >= 1e3, apertures of at least 50 wavelengths)"));
    g.notes.push(format!("max simplified-vs-full deviation {worst_simplified:.3e} (needs <= 1e-3)"));
    g.notes.push(format!("min rho11y - rho12y {min_gap:.4} (needs > -2.34)"));
    Ok(g)
}

/// Twenty CPL scenarios with $z_t \ge 100\lambda$.
pub fn ordering_scenarios() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for tau in [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0] {
        out.push((tau, 6.0, 0.01));
        out.push((tau, 3.0, 0.001));
    }
    out
}

/// $\mathrm{CRB}_1 < \mathrm{CRB}_2 < \mathrm{CRB}_3$ on every finite component.
///
/// The deviation is the smallest relative gap, negated, so any gap above
/// $10^{-12}$ passes.
pub fn ordering() -> Result<GroupResult> {
    let numerics = Numerics::default().with_alpha(101 * 101);
    let scenarios = ordering_scenarios();
    let mut min_gap = f64::INFINITY;
    for &(tau, z, lam) in &scenarios {
        let cfg = PhysicalConfig::new(lam, 10.0)?;
        let c = |m| -> Result<[f64; 3]> { Ok(crb_cpl(&CplScenario::new(tau, z, cfg, m)?, &numerics)?.crb) };
        let (v, s, o) = (c(FieldModel::Vef)?, c(FieldModel::Sef)?, c(FieldModel::Osef)?);
        for k in 0..3 {
            min_gap = min_gap.min(s[k] / v[k] - 1.0);
            if o[k].is_finite() {
                min_gap = min_gap.min(o[k] / s[k] - 1.0);
            }
        }
    }
    let mut g = GroupResult::new("ordering", scenarios.len(), -min_gap, -1e-12);
    g.notes.push(format!("smallest relative gap {min_gap:.3e}"));
    Ok(g)
}

/// Exact inverse SNR scaling and $\lambda^2$ scaling at fixed $\tau$.
pub fn scaling() -> Result<GroupResult> {
    let numerics = Numerics::default();
    let mut snr_dev: f64 = 0.0;
    let mut lam_dev: f64 = 0.0;
    let mut n = 0;
    for tau in [0.1, 1.0, 10.0] {
        for model in [FieldModel::Vef, FieldModel::Sef] {
            let base = PhysicalConfig::new(0.01, 10.0)?;
            let c = |cfg: PhysicalConfig, z: f64| -> Result<[f64; 3]> { Ok(crb_cpl(&CplScenario::new(tau, z, cfg, model)?, &numerics)?.crb) };
            let a = c(base, 6.0)?;
            let b = c(base.with_snr(1000.0)?, 6.0)?;
            let d = c(base.with_wavelength(0.001)?, 6.0)?;
            for k in 0..3 {
                snr_dev = snr_dev.max((a[k] / b[k] / 100.0 - 1.0).abs());
                lam_dev = lam_dev.max((a[k] / d[k] / 100.0 - 1.0).abs());
            }
            n += 1;
        }
    }
    let mut g = GroupResult::new("scaling", n, (snr_dev / 1e-14).max(lam_dev / 1e-2), 1.0);
    g.notes.push(format!("snr scaling deviation {snr_dev:.3e} (needs <= 1e-14)"));
    g.notes.push(format!("wavelength-squared scaling deviation {lam_dev:.3e} (needs <= 1e-2)"));
    Ok(g)
}

/// Mirror-partner equality and off-diagonal cancellation for distributed layouts.
pub fn mirror_symmetry() -> Result<GroupResult> {
    let numerics = Numerics::default().with_alpha(41 * 41);
    let cfg = PhysicalConfig::new(0.001, 10.0)?;
    let mut worst: f64 = 0.0;
    let mut control = f64::INFINITY;
    let mut n = 0;
    for n_s in [2, 4] {
        for d in [6.0, 45.0] {
            let layout = build_layout(n_s, 30.0, d, 6.0)?;
            for model in FieldModel::ALL {
                let r = lemma1_check(&layout, &cfg, model, &numerics)?;
                worst = worst.max(r.partner_max_rel_dev).max(r.off_diagonal_ratio);
                control = control.min(r.negative_control_ratio);
                n += 1;
            }
        }
    }
    let mut g = GroupResult::new("mirror-symmetry", n, worst, 1e-10);
    g.passed &= control > 1e-7;
    g.notes.push(format!("negative control off-diagonal ratio >= {control:.3e}"));
    Ok(g)
}
