//! Reference scenarios: the RCRB table, normalised off-axis surfaces,
//! distributed-receiver comparisons and general-position profiles.

use rayon::prelude::*;
use serde::Serialize;

use crate::cpl::{crb_cpl, CplScenario};
use crate::crb::{crb_point, Numerics};
use crate::error::Result;
use crate::geometry::{linear_to_db, FieldModel, PhysicalConfig, SurfaceGeometry, TerminalPosition};
use crate::simo::{build_layout, crb_simo};

pub const TABLE1_APERTURES: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
pub const TABLE1_DEPTH: f64 = 6.0;
pub const AVERAGE_APERTURE: f64 = 3.0;
pub const AVERAGE_TERMINALS: usize = 1000;
pub const AVERAGE_DEPTH_RANGE: (f64, f64) = (1.0, 20.0);

/// Published RCRBs in cm: columns are the four apertures and the average,
/// rows are `x, y, z`. `None` marks a non-identifiable entry.
pub const PUBLISHED_TABLE1: [(FieldModel, [[Option<f64>; 5]; 3]); 3] = [
    (
        FieldModel::Vef,
        [
            [Some(35.5), Some(8.91), Some(2.25), Some(1.02), Some(3.88)],
            [Some(35.5), Some(8.91), Some(2.26), Some(1.02), Some(3.88)],
            [Some(0.604), Some(0.303), Some(0.153), Some(0.103), Some(0.179)],
        ],
    ),
    (
        FieldModel::Sef,
        [
            [Some(35.5), Some(8.92), Some(2.26), Some(1.03), Some(3.89)],
            [Some(35.6), Some(8.92), Some(2.26), Some(1.03), Some(3.89)],
            [Some(0.605), Some(0.303), Some(0.153), Some(0.104), Some(0.179)],
        ],
    ),
    (
        FieldModel::Osef,
        [
            [None; 5],
            [None; 5],
            [Some(11.8), Some(21.1), Some(20.4), Some(23.7), Some(18.0)],
        ],
    ),
];

/// Published maxima of the normalised off-axis CRBs in dB, `x, y, z`.
pub const PUBLISHED_NORMALIZED_MAX_DB: [(FieldModel, [f64; 3]); 2] =
    [(FieldModel::Vef, [18.40, 18.41, 45.68]), (FieldModel::Sef, [22.41, 22.43, 49.69])];

/// Wavelength, linear SNR and Riemann cell count used for a table row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub wavelength: f64,
    pub snr: f64,
    pub alpha: usize,
}

impl Calibration {
    /// $\lambda = 0.01$ m and linear SNR 10.
    pub const REFERENCE: Calibration = Calibration { wavelength: 0.01, snr: 10.0, alpha: 201 * 201 };
    /// The calibration under which the overall-scalar-field row reproduces.
    pub const OSEF_MATCHED: Calibration = Calibration { wavelength: 0.001, snr: 0.1, alpha: 101 * 101 };

    pub fn config(&self) -> Result<PhysicalConfig> {
        PhysicalConfig::new(self.wavelength, self.snr)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub model: FieldModel,
    pub coordinate: char,
    pub calibration: Calibration,
    /// `false` for rows printed for information only.
    pub gated: bool,
    pub computed: [Option<f64>; 5],
    pub published: [Option<f64>; 5],
}

impl Table1Row {
    /// Relative errors against the published cells, `None` where either side is missing.
    pub fn rel_errors(&self) -> [Option<f64>; 5] {
        std::array::from_fn(|i| match (self.computed[i], self.published[i]) {
            (Some(c), Some(p)) => Some((c - p).abs() / p),
            _ => None,
        })
    }

    /// Identifiability pattern agrees and every finite cell is within `tol`.
    pub fn matches(&self, tol: f64) -> bool {
        (0..5).all(|i| match (self.computed[i], self.published[i]) {
            (Some(c), Some(p)) => (c - p).abs() <= tol * p,
            (None, None) => true,
            _ => false,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1 {
    pub rows: Vec<Table1Row>,
}

fn finite_cm(crb: f64) -> Option<f64> {
    crb.is_finite().then(|| 100.0 * crb.sqrt())
}

/// Depths of the averaged terminals: equally spaced on the closed range.
pub fn average_depths() -> Vec<f64> {
    let (lo, hi) = AVERAGE_DEPTH_RANGE;
    let n = AVERAGE_TERMINALS;
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn table_rows(model: FieldModel, cal: Calibration, gated: bool, numerics: &Numerics) -> Result<Vec<Table1Row>> {
    let cfg = cal.config()?;
    let n = numerics.with_alpha(cal.alpha);
    let eval = |d: f64, z: f64| -> Result<[f64; 3]> { Ok(crb_cpl(&CplScenario::from_aperture(d, z, cfg, model)?, &n)?.crb) };
    let mut cols: Vec<[Option<f64>; 3]> = TABLE1_APERTURES
        .par_iter()
        .map(|&d| eval(d, TABLE1_DEPTH).map(|c| c.map(finite_cm)))
        .collect::<Result<_>>()?;
    let samples: Vec<[f64; 3]> = average_depths().par_iter().map(|&z| eval(AVERAGE_APERTURE, z)).collect::<Result<_>>()?;
    let avg: [Option<f64>; 3] = std::array::from_fn(|k| {
        let mut sum = 0.0;
        for s in &samples {
            sum += finite_cm(s[k])?;
        }
        Some(sum / samples.len() as f64)
    });
    cols.push(avg);
    let published = PUBLISHED_TABLE1.iter().find(|(m, _)| *m == model).map(|(_, t)| *t).unwrap_or([[None; 5]; 3]);
    Ok((0..3)
        .map(|k| Table1Row {
            model,
            coordinate: ['x', 'y', 'z'][k],
            calibration: cal,
            gated,
            computed: std::array::from_fn(|c| cols[c][k]),
            published: published[k],
        })
        .collect())
}

/// All table rows: vector and scalar fields at the reference calibration,
/// the overall scalar field at its matched calibration, and the overall
/// scalar field at the reference calibration as an ungated row.
pub fn table1(numerics: &Numerics) -> Result<Table1> {
    let mut rows = Vec::new();
    rows.extend(table_rows(FieldModel::Vef, Calibration::REFERENCE, true, numerics)?);
    rows.extend(table_rows(FieldModel::Sef, Calibration::REFERENCE, true, numerics)?);
    rows.extend(table_rows(FieldModel::Osef, Calibration::OSEF_MATCHED, true, numerics)?);
    rows.extend(table_rows(FieldModel::Osef, Calibration::REFERENCE, false, numerics)?);
    Ok(Table1 { rows })
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

impl Table1 {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# RCRB [cm] for terminals on the CPL at z_t = 6 m; average over 1000 depths in [1, 20] m with D_r = 3 m\n");
        out.push_str("# calibration: linear SNR is used as given (the published caption wording reads -10 dB)\n");
        out.push_str(&format!(
            "{:<5} {:<2} {:>9} {:>7} {:>9} {:>9} {:>9} {:>9} {:>9}  {}\n",
            "model", "c", "lambda_m", "snr", "D=0.5", "D=1", "D=2", "D=3", "average", "published"
        ));
        for r in &self.rows {
            let published: Vec<String> = r.published.iter().map(|p| p.map_or("-".into(), |x| x.to_string())).collect();
            out.push_str(&format!(
                "{:<5} {:<2} {:>9} {:>7} {:>9} {:>9} {:>9} {:>9} {:>9}  {}{}\n",
                r.model.name(),
                r.coordinate,
                r.calibration.wavelength,
                r.calibration.snr,
                cell(r.computed[0]),
                cell(r.computed[1]),
                cell(r.computed[2]),
                cell(r.computed[3]),
                cell(r.computed[4]),
                published.join(" "),
                if r.gated { "" } else { "  (informational)" }
            ));
        }
        out
    }
}

/// $10\log_{10}$ of off-axis CRBs relative to the on-axis value at the same depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedSurface {
    pub model: FieldModel,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major with `x` fastest.
    pub db: Vec<[f64; 3]>,
}

impl NormalizedSurface {
    pub fn max_db(&self) -> [f64; 3] {
        let mut m = [f64::NEG_INFINITY; 3];
        for v in &self.db {
            for k in 0..3 {
                m[k] = m[k].max(v[k]);
            }
        }
        m
    }
}

/// Equally spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn normalized_surface(
    z: f64,
    d_r: f64,
    cfg: &PhysicalConfig,
    model: FieldModel,
    extent: f64,
    points: usize,
    numerics: &Numerics,
) -> Result<NormalizedSurface> {
    let geom = SurfaceGeometry::new(d_r)?;
    let base = crb_point(&TerminalPosition::on_cpl(z)?, &geom, cfg, model, numerics)?.crb;
    let xs = linspace(-extent, extent, points);
    let ys = xs.clone();
    let coords: Vec<(f64, f64)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    let db = coords
        .par_iter()
        .map(|&(x, y)| {
            let c = crb_point(&TerminalPosition::new(x, y, z)?, &geom, cfg, model, numerics)?.crb;
            Ok(std::array::from_fn(|k| linear_to_db(c[k] / base[k])))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormalizedSurface { model, xs, ys, db })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimoPoint {
    pub d_r: f64,
    pub simo: [f64; 3],
    pub siso: [f64; 3],
}

impl SimoPoint {
    /// $10\log_{10}(\mathrm{CRB}^M / \mathrm{CRB}^C)$ per coordinate.
    pub fn gap_db(&self) -> [f64; 3] {
        std::array::from_fn(|k| linear_to_db(self.simo[k] / self.siso[k]))
    }
}

/// Distributed versus single-antenna bounds over a range of total apertures.
pub fn simo_vs_siso(
    d_values: &[f64],
    n_s: usize,
    r_r: f64,
    z: f64,
    cfg: &PhysicalConfig,
    model: FieldModel,
    numerics: &Numerics,
) -> Result<Vec<SimoPoint>> {
    d_values
        .par_iter()
        .map(|&d| {
            let simo = crb_simo(&build_layout(n_s, r_r, d, z)?, cfg, model, numerics)?.crb;
            let siso = crb_cpl(&CplScenario::from_aperture(d, z, *cfg, model)?, numerics)?.crb;
            Ok(SimoPoint { d_r: d, simo, siso })
        })
        .collect()
}

/// $N_s^2\,\mathrm{CRB}^M / \mathrm{CRB}^C$, which tends to one as $\tau \to \infty$.
pub fn antenna_count_ratio(
    n_s: usize,
    r_r: f64,
    tau: f64,
    z: f64,
    cfg: &PhysicalConfig,
    model: FieldModel,
    numerics: &Numerics,
) -> Result<[f64; 3]> {
    let p = simo_vs_siso(&[tau * z], n_s, r_r, z, cfg, model, numerics)?[0];
    let n2 = (n_s * n_s) as f64;
    Ok(std::array::from_fn(|k| n2 * p.simo[k] / p.siso[k]))
}

/// CRBs at `(x, y, z)` for each depth.
pub fn depth_profile(
    x: f64,
    y: f64,
    depths: &[f64],
    d_r: f64,
    cfg: &PhysicalConfig,
    model: FieldModel,
    numerics: &Numerics,
) -> Result<Vec<[f64; 3]>> {
    let geom = SurfaceGeometry::new(d_r)?;
    depths
        .par_iter()
        .map(|&z| Ok(crb_point(&TerminalPosition::new(x, y, z)?, &geom, cfg, model, numerics)?.crb))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn average_depths_cover_range() {
        let z = average_depths();
        assert_eq!(z.len(), 1000);
        assert_eq!(z[0], 1.0);
        assert_eq!(z[999], 20.0);
    }

    #[test]
    fn published_table_shape() {
        let osef = PUBLISHED_TABLE1[2].1;
        assert!(osef[0].iter().all(|c| c.is_none()));
        assert_eq!(osef[2][3], Some(23.7));
    }

    #[test]
    fn row_matching_rules() {
        let mut r = Table1Row {
            model: FieldModel::Osef,
            coordinate: 'x',
            calibration: Calibration::REFERENCE,
            gated: true,
            computed: [None; 5],
            published: [None; 5],
        };
        assert!(r.matches(0.0));
        r.computed[0] = Some(1.0);
        assert!(!r.matches(1.0));
        r.published[0] = Some(1.01);
        assert!(r.matches(0.02) && !r.matches(0.005));
        assert!((r.rel_errors()[0].unwrap() - 0.01 / 1.01).abs() < 1e-15);
    }

    #[test]
    fn normalized_surface_is_zero_on_axis() {
        let cfg = PhysicalConfig::new(0.01, 10.0).unwrap();
        let s = normalized_surface(6.0, 3.0, &cfg, FieldModel::Vef, 4.0, 3, &Numerics::default()).unwrap();
        assert_eq!(s.db.len(), 9);
        for k in 0..3 {
            assert!(s.db[4][k].abs() < 1e-9);
        }
        assert!(s.max_db().iter().all(|&m| m > 0.0));
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(-1.0, 1.0, 3), vec![-1.0, 0.0, 1.0]);
        assert_eq!(linspace(2.0, 5.0, 1), vec![2.0]);
    }
}
