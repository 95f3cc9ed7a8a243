//! Command-line front end behind the `nfcrb` binary.
//!
//! Exit codes: 0 success, 1 validation failure, 2 configuration error,
//! 3 numerical failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{as_config, ModelSelection, Scenario, ScenarioConfig, SimoSection, SweepParameter};
use crate::cpl::{crb_cpl, CplScenario};
use crate::crb::{crb_point, CrbResult};
use crate::error::{CrbError, Result};
use crate::geometry::{db_to_linear, linear_to_db, regime_classify, FieldModel, RegimeDistances, SurfaceGeometry, TerminalPosition};
use crate::repro::table1;
use crate::simo::{build_layout, crb_simo};
use crate::validate::run_all;

#[derive(Debug, Parser)]
#[command(name = "nfcrb", version, about = "Near-field positioning Cramér-Rao bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the scenario's field model.
    #[arg(long, global = true)]
    pub model: Option<ModelSelection>,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// CRBs at the configured terminal.
    Point,
    /// One row per value of the configured sweep.
    Sweep,
    /// The RCRB comparison table.
    Table1,
    /// Distributed receiver against a single aperture of the same total area.
    Simo,
    /// Runs every oracle group; exits with 1 on failure.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn main_exit_code() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CrbError::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Point => cmd_point(cli),
        Command::Sweep => cmd_sweep(cli),
        Command::Table1 => cmd_table1(cli),
        Command::Simo => cmd_simo(cli),
        Command::Validate => cmd_validate(cli),
    })
}

fn load(cli: &Cli) -> Result<Scenario> {
    let path = cli.config.as_deref().ok_or_else(|| CrbError::config("--config is required for this command"))?;
    let mut cfg = ScenarioConfig::from_path(path)?;
    if let Some(m) = cli.model {
        cfg.field_model = m;
    }
    cfg.scenario()
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => write_file(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CrbError::config(format!("cannot write to stdout: {e}")))
        }
    }
}

fn write_file(p: &Path, text: &str) -> Result<()> {
    std::fs::write(p, text).map_err(|e| CrbError::config(format!("cannot write {}: {e}", p.display())))
}

/// Rounds to nine significant digits.
pub fn round9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// Nine significant digits, `-` for non-finite values.
pub fn fmt9(x: f64) -> String {
    if x.is_finite() {
        format!("{:e}", round9(x))
    } else {
        "-".into()
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round9(x))
    } else {
        Value::Null
    }
}

/// CRBs for a scenario: distributed layout, CPL shortcut or general engine.
pub fn evaluate(s: &Scenario, model: FieldModel) -> Result<CrbResult> {
    if let Some(simo) = s.simo {
        let layout = build_layout(simo.n_s, simo.r_r_m, s.geom.diagonal(), s.terminal.z)?;
        return crb_simo(&layout, &s.cfg, model, &s.numerics);
    }
    if s.terminal.is_cpl() {
        let sc = CplScenario::from_aperture(s.geom.diagonal(), s.terminal.z, s.cfg, model)?;
        return crb_cpl(&sc, &s.numerics);
    }
    crb_point(&s.terminal, &s.geom, &s.cfg, model, &s.numerics)
}

fn result_json(r: &CrbResult) -> Value {
    json!({
        "model": r.model.name(),
        "path": r.path,
        "crb_m2": { "x": num(r.crb[0]), "y": num(r.crb[1]), "z": num(r.crb[2]) },
        "rcrb_cm": { "x": num(r.rcrb_cm()[0]), "y": num(r.rcrb_cm()[1]), "z": num(r.rcrb_cm()[2]) },
        "identifiable": { "x": r.identifiable()[0], "y": r.identifiable()[1], "z": r.identifiable()[2] },
        "rank_deficient": r.rank_deficient,
        "warnings": r.warnings,
    })
}

/// One output row of a point, sweep or SIMO command.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub params: Vec<f64>,
    pub result: CrbResult,
    pub norm_db: Option<[f64; 3]>,
}

const CRB_COLUMNS: [&str; 10] = [
    "crb_x_m2",
    "crb_y_m2",
    "crb_z_m2",
    "rcrb_x_cm",
    "rcrb_y_cm",
    "rcrb_z_cm",
    "model",
    "identifiable_x",
    "identifiable_y",
    "identifiable_z",
];

fn param_names(n: usize) -> Vec<&'static str> {
    ["param_value", "param2_value"][..n].to_vec()
}

pub fn rows_to_csv(rows: &[Row], n_params: usize, with_norm: bool) -> String {
    let mut header: Vec<&str> = param_names(n_params);
    header.extend(CRB_COLUMNS);
    if with_norm {
        header.extend(["norm_x_db", "norm_y_db", "norm_z_db"]);
    }
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let r = &row.result;
        let mut f: Vec<String> = row.params.iter().map(|&p| fmt9(p)).collect();
        f.extend(r.crb.iter().map(|&c| fmt9(c)));
        f.extend(r.rcrb_cm().iter().map(|&c| fmt9(c)));
        f.push(r.model.name().into());
        f.extend(r.identifiable().iter().map(|b| b.to_string()));
        if with_norm {
            let n = row.norm_db.unwrap_or([f64::NAN; 3]);
            f.extend(n.iter().map(|&c| fmt9(c)));
        }
        out.push_str(&f.join(","));
        out.push('\n');
    }
    out
}

pub fn rows_to_json(rows: &[Row], names: &[&str]) -> String {
    let v: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut o = result_json(&row.result);
            for (name, p) in names.iter().zip(&row.params) {
                o[*name] = num(*p);
            }
            if let Some(n) = row.norm_db {
                o["norm_db"] = json!({ "x": num(n[0]), "y": num(n[1]), "z": num(n[2]) });
            }
            o
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&v).expect("rows serialise");
    s.push('\n');
    s
}

fn cmd_point(cli: &Cli) -> Result<i32> {
    let s = load(cli)?;
    let results = s.models.par_iter().map(|&m| evaluate(&s, m)).collect::<Result<Vec<_>>>()?;
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let dist = RegimeDistances::new(&s.geom, &s.cfg);
            let regime = regime_classify(s.terminal.r_to(), &s.geom, &s.cfg)?;
            let report = json!({
                "scenario": {
                    "wavelength_m": num(s.cfg.wavelength()),
                    "snr_linear": num(s.cfg.snr()),
                    "d_r_m": num(s.geom.diagonal()),
                    "terminal_m": [num(s.terminal.x), num(s.terminal.y), num(s.terminal.z)],
                    "tau": num(s.geom.tau(s.terminal.z)),
                    "simo": s.simo,
                },
                "regime": regime.name(),
                "fresnel_distance_m": num(dist.fresnel),
                "fraunhofer_distance_m": num(dist.fraunhofer),
                "results": results.iter().map(result_json).collect::<Vec<_>>(),
            });
            emit(cli, &(serde_json::to_string_pretty(&report).expect("report serialises") + "\n"))?;
        }
        Format::Csv => {
            let rows: Vec<Row> = results.into_iter().map(|result| Row { params: vec![], result, norm_db: None }).collect();
            emit(cli, &rows_to_csv(&rows, 0, false))?;
        }
    }
    Ok(0)
}

/// Applies one sweep value to a scenario.
pub fn apply(s: &mut Scenario, p: SweepParameter, v: f64) -> Result<()> {
    apply_inner(s, p, v).map_err(as_config)
}

fn apply_inner(s: &mut Scenario, p: SweepParameter, v: f64) -> Result<()> {
    let t = s.terminal;
    match p {
        SweepParameter::DR => s.geom = SurfaceGeometry::new(v)?,
        SweepParameter::ZT => s.terminal = TerminalPosition::new(t.x, t.y, v)?,
        SweepParameter::XT => s.terminal = TerminalPosition::new(v, t.y, t.z)?,
        SweepParameter::YT => s.terminal = TerminalPosition::new(t.x, v, t.z)?,
        SweepParameter::Lambda => s.cfg = s.cfg.with_wavelength(v)?,
        SweepParameter::SnrDb => s.cfg = s.cfg.with_snr(db_to_linear(v))?,
        SweepParameter::NS => {
            let simo: &mut SimoSection = s.simo.as_mut().ok_or_else(|| CrbError::config("an n_s sweep needs an enabled simo section"))?;
            let n = v.round();
            if (v - n).abs() > 1e-9 || n < 1.0 || (n != 1.0 && n % 2.0 != 0.0) {
                return Err(CrbError::config(format!("n_s sweep value {v} is not 1 or an even integer")));
            }
            simo.n_s = n as usize;
        }
    }
    if s.simo.is_some() && !s.terminal.is_cpl() {
        return Err(CrbError::config("SIMO sweeps require a terminal on the CPL"));
    }
    Ok(())
}

/// Evaluates every sweep point in order; 2-D sweeps also report CRBs
/// relative to the same scenario with the terminal moved onto the CPL.
pub fn sweep_rows(s: &Scenario) -> Result<(Vec<Row>, usize)> {
    let spec = s.sweep.clone().ok_or_else(|| CrbError::config("the scenario has no sweep section"))?;
    let mut points: Vec<Vec<(SweepParameter, f64)>> = Vec::new();
    for v in spec.values() {
        match &spec.second {
            Some(inner) => {
                for w in inner.values() {
                    points.push(vec![(spec.parameter, v), (inner.parameter, w)]);
                }
            }
            None => points.push(vec![(spec.parameter, v)]),
        }
    }
    let n_params = if spec.second.is_some() { 2 } else { 1 };
    let mut jobs = Vec::new();
    for pt in &points {
        let mut sc = s.clone();
        for &(p, v) in pt {
            apply(&mut sc, p, v)?;
        }
        for &m in &s.models {
            jobs.push((pt.iter().map(|&(_, v)| v).collect::<Vec<_>>(), sc.clone(), m));
        }
    }
    let rows = jobs
        .par_iter()
        .map(|(params, sc, m)| {
            let result = evaluate(sc, *m)?;
            let norm_db = if n_params == 2 {
                let mut on_axis = sc.clone();
                on_axis.terminal = TerminalPosition::on_cpl(sc.terminal.z)?;
                let base = if on_axis.terminal == sc.terminal { result.crb } else { evaluate(&on_axis, *m)?.crb };
                Some(std::array::from_fn(|k| linear_to_db(result.crb[k] / base[k])))
            } else {
                None
            };
            Ok(Row { params: params.clone(), result, norm_db })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, n_params))
}

fn cmd_sweep(cli: &Cli) -> Result<i32> {
    let s = load(cli)?;
    let (rows, n) = sweep_rows(&s)?;
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => rows_to_csv(&rows, n, n == 2),
        Format::Json => rows_to_json(&rows, &param_names(n)),
    };
    emit(cli, &text)?;
    Ok(0)
}

fn cmd_table1(cli: &Cli) -> Result<i32> {
    let numerics = match &cli.config {
        Some(_) => load(cli)?.numerics,
        None => Default::default(),
    };
    let t = table1(&numerics)?;
    let csv = || {
        let mut out = String::from("model,coordinate,wavelength_m,snr,gated,column,rcrb_cm,published_cm\n");
        for r in &t.rows {
            for (c, name) in ["d0.5", "d1", "d2", "d3", "average"].iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.model.name(),
                    r.coordinate,
                    fmt9(r.calibration.wavelength),
                    fmt9(r.calibration.snr),
                    r.gated,
                    name,
                    r.computed[c].map_or("-".into(), fmt9),
                    r.published[c].map_or("-".into(), fmt9)
                ));
            }
        }
        out
    };
    match cli.format {
        None => {
            print!("{}", t.render_text());
            if let Some(p) = &cli.out {
                write_file(p, &csv())?;
            }
        }
        Some(Format::Csv) => emit(cli, &csv())?,
        Some(Format::Json) => emit(cli, &(serde_json::to_string_pretty(&t).expect("table serialises") + "\n"))?,
    }
    Ok(0)
}

fn cmd_simo(cli: &Cli) -> Result<i32> {
    let s = load(cli)?;
    let simo = s.simo.ok_or_else(|| CrbError::config("the simo command needs an enabled simo section"))?;
    let mut siso = s.clone();
    siso.simo = None;
    let jobs: Vec<(bool, FieldModel)> = s.models.iter().flat_map(|&m| [(true, m), (false, m)]).collect();
    let results = jobs
        .par_iter()
        .map(|&(distributed, m)| evaluate(if distributed { &s } else { &siso }, m))
        .collect::<Result<Vec<_>>>()?;
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let layout = build_layout(simo.n_s, simo.r_r_m, s.geom.diagonal(), s.terminal.z)?;
            let pairs: Vec<Value> = results
                .chunks(2)
                .map(|p| {
                    json!({
                        "model": p[0].model.name(),
                        "simo": result_json(&p[0]),
                        "siso": result_json(&p[1]),
                        "gap_db": (0..3).map(|k| num(linear_to_db(p[0].crb[k] / p[1].crb[k]))).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let report = json!({
                "layout": {
                    "n_s": layout.n_s,
                    "r_r_m": num(layout.r_r),
                    "d_r_m": num(layout.d_r),
                    "z_t_m": num(layout.z_t),
                    "antennas": layout.antennas.len(),
                    "overlapping": layout.overlapping,
                },
                "results": pairs,
            });
            emit(cli, &(serde_json::to_string_pretty(&report).expect("report serialises") + "\n"))?;
        }
        Format::Csv => {
            let rows: Vec<Row> = results
                .into_iter()
                .zip(&jobs)
                .map(|(result, &(distributed, _))| Row {
                    params: vec![if distributed { simo.n_s as f64 } else { 1.0 }],
                    result,
                    norm_db: None,
                })
                .collect();
            emit(cli, &rows_to_csv(&rows, 1, false).replacen("param_value", "n_s", 1))?;
        }
    }
    Ok(0)
}

fn cmd_validate(cli: &Cli) -> Result<i32> {
    let report = run_all()?;
    emit(cli, &(serde_json::to_string_pretty(&report).expect("report serialises") + "\n"))?;
    for g in report.groups.iter().filter(|g| !g.passed) {
        eprintln!("validation group {} failed: max deviation {:e} > {:e}", g.name, g.max_deviation, g.tolerance);
    }
    Ok(if report.passed { 0 } else { 1 })
}
