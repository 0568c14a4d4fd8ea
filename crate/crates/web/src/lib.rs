//! Browser bindings for the headstab simulator.
//!
//! Every export has a plain Rust twin returning `Result<_, String>` so the
//! logic can be tested natively; the `#[wasm_bindgen]` wrappers only convert
//! errors into JS exceptions.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use headstab::admittance::{AdmittanceFilter, AdmittanceParams};
use headstab::metrics_harness::experiment::{run_mode, scenario_profile, ModeRun};
use headstab::metrics_harness::{MetricsReport, Scenario};
use headstab::plant_sim::{terrain_height, TerrainKind, TerrainProfile};
use headstab::{Config, Mode};

/// Downsampled traces of one mode.
#[derive(Debug, Serialize)]
pub struct Series {
    pub mode: &'static str,
    pub reference_height: f64,
    pub t: Vec<f64>,
    pub z_head: Vec<f64>,
    pub vz_head: Vec<f64>,
    pub fz_est: Vec<f64>,
    pub fz_true: Vec<f64>,
    pub l_d_prime: Vec<f64>,
    pub contact: Vec<bool>,
}

impl Series {
    fn of(run: &ModeRun, stride: usize) -> Self {
        let rec = || run.trace.records.iter().step_by(stride);
        Self {
            mode: run.mode.name(),
            reference_height: run.reference_height,
            t: rec().map(|r| r.t).collect(),
            z_head: rec().map(|r| r.z_head).collect(),
            vz_head: rec().map(|r| r.vz_head).collect(),
            fz_est: rec().map(|r| r.fz_est).collect(),
            fz_true: rec().map(|r| r.fz_true).collect(),
            l_d_prime: rec().map(|r| r.l_d_prime).collect(),
            contact: rec().map(|r| r.contact).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub scenario: &'static str,
    pub report: MetricsReport,
    pub runs: Vec<Series>,
}

fn parse_config(config_toml: &str) -> Result<Config, String> {
    let cfg = if config_toml.trim().is_empty() {
        Config::default().resolved()
    } else {
        Config::from_toml_str(config_toml)
    };
    cfg.map_err(|e| e.to_string())
}

/// Run a scenario in both modes and compare them. The browser has no
/// threads, so the two runs are sequential.
pub fn compare(scenario: &str, config_toml: &str, stride: usize) -> Result<Comparison, String> {
    let cfg = parse_config(config_toml)?;
    let scenario: Scenario = scenario.parse().map_err(|e: headstab::Error| e.to_string())?;
    let stride = stride.max(1);
    let baseline = run_mode(&cfg, scenario, Mode::Baseline).map_err(|e| e.to_string())?;
    let proposed = run_mode(&cfg, scenario, Mode::Proposed).map_err(|e| e.to_string())?;
    let report = MetricsReport::build(
        scenario.name(),
        cfg.run.transient_s,
        Some((&baseline.metrics, baseline.reference_height)),
        Some((&proposed.metrics, proposed.reference_height)),
    );
    Ok(Comparison {
        scenario: scenario.name(),
        report,
        runs: vec![Series::of(&baseline, stride), Series::of(&proposed, stride)],
    })
}

pub fn compare_json(scenario: &str, config_toml: &str, stride: usize) -> Result<String, String> {
    let c = compare(scenario, config_toml, stride)?;
    serde_json::to_string(&c).map_err(|e| e.to_string())
}

/// Ground height at `samples` evenly spaced points from the lead-in start to
/// the end of the run-out, interleaved as `[x0, h0, x1, h1, ...]`.
pub fn terrain_samples(kind: &str, config_toml: &str, samples: usize) -> Result<Vec<f64>, String> {
    let cfg = parse_config(config_toml)?;
    let profile = match kind.parse::<Scenario>() {
        Ok(sc) => scenario_profile(&cfg, sc),
        Err(_) => kind
            .parse::<TerrainKind>()
            .and_then(|k| TerrainProfile::build(k, &cfg.terrain)),
    }
    .map_err(|e| e.to_string())?;
    let (x0, x1) = (-cfg.run.lead_in_m, profile.extent() + cfg.run.run_out_m);
    let n = samples.max(2);
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let x = x0 + (x1 - x0) * i as f64 / (n - 1) as f64;
        out.push(x);
        out.push(terrain_height(&profile, x));
    }
    Ok(out)
}

/// Correction `ΔL[k]` of the discrete admittance filter for a constant force
/// step applied from rest, over `duration_s`.
pub fn admittance_response(
    stiffness: f64,
    damping: f64,
    inertia: f64,
    k_ad: f64,
    period: f64,
    force: f64,
    duration_s: f64,
) -> Result<Vec<f64>, String> {
    let params = AdmittanceParams {
        stiffness,
        damping,
        inertia,
        k_ad,
        period,
        ..AdmittanceParams::default()
    };
    let mut filter = AdmittanceFilter::new(params, -1e9, 1e9).map_err(|e| e.to_string())?;
    let ticks = (duration_s / period).round();
    if !(1.0..=1e6).contains(&ticks) {
        return Err(format!("duration {duration_s} s gives {ticks} ticks"));
    }
    Ok((0..ticks as usize)
        .map(|_| {
            filter.step(force, 0.0);
            filter.correction()
        })
        .collect())
}

fn js_err(e: String) -> JsError {
    JsError::new(&e)
}

/// JSON with the metrics report and downsampled traces of both modes.
/// An empty `config_toml` uses the defaults.
#[wasm_bindgen(js_name = compareModes)]
pub fn compare_modes(scenario: &str, config_toml: &str, stride: usize) -> Result<String, JsError> {
    compare_json(scenario, config_toml, stride).map_err(js_err)
}

#[wasm_bindgen(js_name = terrainProfile)]
pub fn terrain_profile(kind: &str, config_toml: &str, samples: usize) -> Result<Vec<f64>, JsError> {
    terrain_samples(kind, config_toml, samples).map_err(js_err)
}

#[wasm_bindgen(js_name = admittanceStep)]
pub fn admittance_step(
    stiffness: f64,
    damping: f64,
    inertia: f64,
    k_ad: f64,
    period: f64,
    force: f64,
    duration_s: f64,
) -> Result<Vec<f64>, JsError> {
    admittance_response(stiffness, damping, inertia, k_ad, period, force, duration_s).map_err(js_err)
}

#[wasm_bindgen(js_name = defaultConfig)]
pub fn default_config() -> String {
    Config::default().to_toml_string().unwrap_or_default()
}
