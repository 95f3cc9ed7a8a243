//! Builds a scenario from JSON and evaluates it the way the CLI does.

use nearfield_crb::cli::evaluate;
use nearfield_crb::config::ScenarioConfig;

const SCENARIO: &str = r#"{
  "physical": { "wavelength_m": 0.001, "snr_db": 10.0 },
  "surface": { "d_r_m": 1.0 },
  "terminal": { "cpl": true, "z_m": 6.0 },
  "field_model": "all",
  "numerics": { "riemann_alpha": 3721 },
  "simo": { "n_s": 2, "r_r_m": 30.0 }
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ScenarioConfig::from_json(SCENARIO)?;
    let scenario = config.scenario()?;
    let mut single = scenario.clone();
    single.simo = None;
    for &model in &scenario.models {
        for (label, s) in [("4 antennas", &scenario), ("1 antenna", &single)] {
            let r = evaluate(s, model)?;
            let c = r.rcrb_cm();
            println!("{:<4} {label:<10} {:>12.5} {:>12.5} {:>12.5} cm", model.name(), c[0], c[1], c[2]);
        }
    }
    println!("{}", config.to_json());
    Ok(())
}
