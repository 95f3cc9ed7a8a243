//! JSON scenario files.
//!
//! ```json
//! {
//!   "physical": { "wavelength_m": 0.01, "snr": 10.0 },
//!   "surface": { "d_r_m": 3.0 },
//!   "terminal": { "cpl": true, "z_m": 6.0 },
//!   "field_model": "all",
//!   "numerics": { "quadrature_order": 32, "panels": 4, "tol": 1e-10, "riemann_alpha": 40401 },
//!   "simo": { "enabled": false, "n_s": 2, "r_r_m": 30.0 },
//!   "sweep": { "parameter": "d_r", "from": 1.0, "to": 1000.0, "points": 31, "scale": "log" }
//! }
//! ```
//!
//! Exactly one of `snr` (linear) and `snr_db` must be given. The terminal is
//! either `{ "cpl": true, "z_m": .. }` or `{ "x_m": .., "y_m": .., "z_m": .. }`.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::crb::Numerics;
use crate::error::{CrbError, Result};
use crate::geometry::{db_to_linear, FieldModel, PhysicalConfig, SurfaceGeometry, TerminalPosition};
use crate::quadrature::{grid_side, QuadratureSpec, Rule};

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSection {
    pub wavelength_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_ohm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    pub d_r_m: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpl: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_m: Option<f64>,
    pub z_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(default = "default_order")]
    pub quadrature_order: usize,
    #[serde(default = "default_panels")]
    pub panels: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_alpha")]
    pub riemann_alpha: usize,
}

fn default_order() -> usize {
    32
}
fn default_panels() -> usize {
    4
}
fn default_tol() -> f64 {
    1e-10
}
fn default_alpha() -> usize {
    201 * 201
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self { quadrature_order: default_order(), panels: default_panels(), tol: default_tol(), riemann_alpha: default_alpha() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimoSection {
    #[serde(default = "default_true")]
    pub enabled: bool,
    pub n_s: usize,
    pub r_r_m: f64,
}

fn default_true() -> bool {
    true
}

/// Which models to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(try_from = "String", into = "String")]
pub enum ModelSelection {
    One(FieldModel),
    All,
}

impl ModelSelection {
    pub fn models(&self) -> Vec<FieldModel> {
        match self {
            ModelSelection::One(m) => vec![*m],
            ModelSelection::All => FieldModel::ALL.to_vec(),
        }
    }
}

impl FromStr for ModelSelection {
    type Err = CrbError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            Ok(ModelSelection::All)
        } else {
            Ok(ModelSelection::One(s.parse()?))
        }
    }
}

impl TryFrom<String> for ModelSelection {
    type Error = CrbError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModelSelection> for String {
    fn from(m: ModelSelection) -> String {
        match m {
            ModelSelection::One(m) => m.name().to_string(),
            ModelSelection::All => "all".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    DR,
    ZT,
    Lambda,
    SnrDb,
    NS,
    XT,
    YT,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::DR => "d_r",
            SweepParameter::ZT => "z_t",
            SweepParameter::Lambda => "lambda",
            SweepParameter::SnrDb => "snr_db",
            SweepParameter::NS => "n_s",
            SweepParameter::XT => "x_t",
            SweepParameter::YT => "y_t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepScale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: SweepScale,
    /// Inner axis of a two-dimensional sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<Box<SweepSpec>>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(CrbError::config(format!("sweep {}: need from < to", self.parameter.name())));
        }
        if self.points < 2 {
            return Err(CrbError::config(format!("sweep {}: need at least 2 points", self.parameter.name())));
        }
        if self.scale == SweepScale::Log && self.from <= 0.0 {
            return Err(CrbError::config(format!("sweep {}: log scale needs from > 0", self.parameter.name())));
        }
        if let Some(s) = &self.second {
            if s.second.is_some() {
                return Err(CrbError::config("sweeps have at most two axes"));
            }
            if s.parameter == self.parameter {
                return Err(CrbError::config("the two sweep axes must differ"));
            }
            s.validate()?;
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.scale {
                    SweepScale::Linear => self.from + (self.to - self.from) * t,
                    SweepScale::Log => (self.from.ln() + (self.to.ln() - self.from.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub physical: PhysicalSection,
    pub surface: SurfaceSection,
    pub terminal: TerminalSection,
    #[serde(default = "default_models")]
    pub field_model: ModelSelection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simo: Option<SimoSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn default_models() -> ModelSelection {
    ModelSelection::All
}

/// Typed, validated view of a [`ScenarioConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cfg: PhysicalConfig,
    pub geom: SurfaceGeometry,
    pub terminal: TerminalPosition,
    pub models: Vec<FieldModel>,
    pub numerics: Numerics,
    pub simo: Option<SimoSection>,
    pub sweep: Option<SweepSpec>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CrbError::config(format!("invalid scenario: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CrbError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    pub fn physical_config(&self) -> Result<PhysicalConfig> {
        let p = &self.physical;
        let snr = match (p.snr, p.snr_db) {
            (Some(s), None) => s,
            (None, Some(db)) => db_to_linear(db),
            _ => return Err(CrbError::config("give exactly one of physical.snr and physical.snr_db")),
        };
        let cfg = PhysicalConfig::new(p.wavelength_m, snr).map_err(as_config)?;
        match p.eta_ohm {
            Some(eta) => cfg.with_impedance(eta).map_err(as_config),
            None => Ok(cfg),
        }
    }

    pub fn terminal_position(&self) -> Result<TerminalPosition> {
        let t = &self.terminal;
        let pos = match (t.cpl, t.x_m, t.y_m) {
            (Some(true), None, None) => TerminalPosition::on_cpl(t.z_m),
            (Some(true), _, _) => return Err(CrbError::config("terminal: cpl = true excludes x_m and y_m")),
            (Some(false) | None, Some(x), Some(y)) => TerminalPosition::new(x, y, t.z_m),
            _ => return Err(CrbError::config("terminal: give either cpl = true or both x_m and y_m")),
        };
        pos.map_err(as_config)
    }

    pub fn numerics(&self) -> Result<Numerics> {
        let n = &self.numerics;
        let quad = QuadratureSpec {
            rule: Rule::TensorGauss { order: n.quadrature_order },
            panels: n.panels,
            tol: n.tol,
            ..QuadratureSpec::default()
        };
        quad.validate()?;
        grid_side(n.riemann_alpha)?;
        Ok(Numerics { quad, alpha: n.riemann_alpha })
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let simo = self.simo.filter(|s| s.enabled);
        if let Some(s) = simo {
            if s.n_s == 0 || (s.n_s != 1 && s.n_s % 2 != 0) {
                return Err(CrbError::config(format!("simo.n_s must be 1 or even, got {}", s.n_s)));
            }
            if !(s.r_r_m > 0.0) {
                return Err(CrbError::config("simo.r_r_m must be positive"));
            }
        }
        if let Some(sw) = &self.sweep {
            sw.validate()?;
        }
        let terminal = self.terminal_position()?;
        if simo.is_some() && !terminal.is_cpl() {
            return Err(CrbError::config("SIMO scenarios require a terminal on the CPL"));
        }
        Ok(Scenario {
            cfg: self.physical_config()?,
            geom: SurfaceGeometry::new(self.surface.d_r_m).map_err(as_config)?,
            terminal,
            models: self.field_model.models(),
            numerics: self.numerics()?,
            simo,
            sweep: self.sweep.clone(),
        })
    }
}

pub(crate) fn as_config(e: CrbError) -> CrbError {
    match e {
        CrbError::Domain(m) => CrbError::Config(m),
        other => other,
    }
}
