use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nfcrb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn nfcrb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nfcrb")).args(args).output().unwrap()
}

fn with_config(cmd: &str, name: &str, body: &str, extra: &[&str]) -> Output {
    let p = scratch(name, body);
    let mut args = vec![cmd, "--config", p.to_str().unwrap()];
    args.extend_from_slice(extra);
    nfcrb(&args)
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

const ON_AXIS: &str = r#"{
  "physical": { "wavelength_m": 0.01, "snr": 10.0 },
  "surface": { "d_r_m": 3.0 },
  "terminal": { "cpl": true, "z_m": 6.0 },
  "field_model": "vef"
}"#;

#[test]
fn point_reports_regime_and_bounds() {
    let v = json(&with_config("point", "on_axis.json", ON_AXIS, &[]));
    assert_eq!(v["regime"], "reactive");
    let r = &v["results"][0];
    assert_eq!(r["model"], "vef");
    assert!((r["rcrb_cm"]["x"].as_f64().unwrap() - 1.0198).abs() < 0.02);
}

#[test]
fn cpl_flag_matches_explicit_origin() {
    let explicit = ON_AXIS.replace(r#""cpl": true"#, r#""x_m": 0.0, "y_m": 0.0"#);
    let a = json(&with_config("point", "cpl_flag.json", ON_AXIS, &[]));
    let b = json(&with_config("point", "explicit.json", &explicit, &[]));
    assert_eq!(a["results"][0]["crb_m2"], b["results"][0]["crb_m2"]);
}

#[test]
fn snr_in_decibels_matches_linear_snr() {
    let db = ON_AXIS.replace(r#""snr": 10.0"#, r#""snr_db": 10.0"#);
    let a = json(&with_config("point", "lin.json", ON_AXIS, &[]));
    let b = json(&with_config("point", "db.json", &db, &[]));
    for k in ["x", "y", "z"] {
        let (x, y) = (a["results"][0]["crb_m2"][k].as_f64().unwrap(), b["results"][0]["crb_m2"][k].as_f64().unwrap());
        assert!((x / y - 1.0).abs() < 1e-8);
    }
}

#[test]
fn model_flag_overrides_config() {
    let v = json(&with_config("point", "override.json", ON_AXIS, &["--model", "all"]));
    let models: Vec<_> = v["results"].as_array().unwrap().iter().map(|r| r["model"].as_str().unwrap().to_owned()).collect();
    assert_eq!(models, ["vef", "sef", "osef"]);
}

#[test]
fn osef_on_axis_is_marked_non_identifiable() {
    let o = with_config("point", "osef.json", ON_AXIS, &["--model", "osef", "--format", "csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..2], ["-", "-"]);
    assert_eq!(&row[7..], ["false", "false", "true"]);
}

#[test]
fn one_dimensional_sweep_csv() {
    let body = ON_AXIS.replace(
        r#""field_model": "vef""#,
        r#""field_model": "vef", "sweep": { "parameter": "z_t", "from": 1.0, "to": 100.0, "points": 5, "scale": "log" }"#,
    );
    let o = with_config("sweep", "sweep1.json", &body, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("param_value,crb_x_m2"));
    assert!(lines[5].starts_with("1e2,"));
    let z: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert!(z.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn sweep_writes_to_out_file() {
    let body = ON_AXIS.replace(
        r#""field_model": "vef""#,
        r#""field_model": "sef", "sweep": { "parameter": "snr_db", "from": 0.0, "to": 20.0, "points": 3 }"#,
    );
    let out = std::env::temp_dir().join(format!("nfcrb-cli-{}-out.json", std::process::id()));
    let o = with_config("sweep", "sweep_out.json", &body, &["--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let ratio = rows[0]["crb_m2"]["x"].as_f64().unwrap() / rows[2]["crb_m2"]["x"].as_f64().unwrap();
    assert!((ratio - 100.0).abs() < 1e-5);
    std::fs::remove_file(out).unwrap();
}

#[test]
fn simo_command_compares_with_single_aperture() {
    let body = ON_AXIS.replace(r#""field_model": "vef""#, r#""field_model": "vef", "simo": { "n_s": 2, "r_r_m": 30.0 }"#);
    let v = json(&with_config("simo", "simo.json", &body, &[]));
    assert_eq!(v["layout"]["antennas"], 4);
    let gap = &v["results"][0]["gap_db"];
    assert!(gap[0].as_f64().unwrap() < 0.0 && gap[2].as_f64().unwrap() > 0.0);
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(nfcrb(&["point"]).status.code(), Some(2));
    assert_eq!(nfcrb(&["point", "--config", "/nonexistent/nfcrb.json"]).status.code(), Some(2));
    assert_eq!(with_config("point", "broken.json", "{ not json", &[]).status.code(), Some(2));
    let negative = ON_AXIS.replace("0.01", "-0.01");
    assert_eq!(with_config("point", "negative.json", &negative, &[]).status.code(), Some(2));
    let unknown = ON_AXIS.replace(r#""field_model""#, r#""colour": 1, "field_model""#);
    assert_eq!(with_config("point", "unknown.json", &unknown, &[]).status.code(), Some(2));
    let off_axis_simo =
        ON_AXIS.replace(r#""cpl": true"#, r#""x_m": 1.0, "y_m": 0.0"#).replace(r#""field_model": "vef""#, r#""simo": { "n_s": 2, "r_r_m": 30.0 }"#);
    assert_eq!(with_config("simo", "offaxis.json", &off_axis_simo, &[]).status.code(), Some(2));
    assert_eq!(with_config("sweep", "nosweep.json", ON_AXIS, &[]).status.code(), Some(2));
    assert_eq!(nfcrb(&["point", "--model", "maxwell"]).status.code(), Some(2));
}

#[test]
fn validate_passes() {
    let v = json(&nfcrb(&["validate"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["groups"].as_array().unwrap().len(), 9);
}
