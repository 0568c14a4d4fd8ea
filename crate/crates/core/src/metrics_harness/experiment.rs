//! Closed-loop scenario runs and the baseline-versus-proposed comparison.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{MetricsReport, ModeMetrics, SimTrace, TraceRecord};
use crate::config::Config;
use crate::contact_detector::ContactStatus;
use crate::error::{invalid, Error, Result};
use crate::height_controller::knee_lever;
use crate::leg_model::JointState;
use crate::pipeline::{Controller, Mode};
use crate::plant_sim::{Plant, Sensors, SimState, TerrainKind, TerrainProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Slope up, flat top, slope down.
    Exp1,
    /// Band-limited rugged field.
    Exp2,
    /// Sinusoidal ground.
    Exp3,
    Flat,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Exp1, Scenario::Exp2, Scenario::Exp3, Scenario::Flat];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Exp1 => "exp1",
            Scenario::Exp2 => "exp2",
            Scenario::Exp3 => "exp3",
            Scenario::Flat => "flat",
        }
    }

    pub fn terrain_kind(self) -> TerrainKind {
        match self {
            Scenario::Exp1 => TerrainKind::SingleSlope,
            Scenario::Exp2 => TerrainKind::HighFreqRugged,
            Scenario::Exp3 => TerrainKind::Sinusoid,
            Scenario::Flat => TerrainKind::Flat,
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| invalid("scenario", format!("unknown scenario `{s}`")))
    }
}

/// Run the closed loop from rest at `x_start` over `profile` for `duration_s`.
///
/// One record is logged per control tick, holding the plant state at the
/// start of the tick together with the controller outputs of that tick.
pub fn simulate(cfg: &Config, profile: &TerrainProfile, mode: Mode, x_start: f64, duration_s: f64) -> Result<SimTrace> {
    let geom = cfg.geometry()?;
    let l_d = cfg.run.leg_length_ref;
    let period = cfg.admittance.period;
    let substeps = cfg.substeps();

    let state = SimState::settled(&cfg.plant, &geom, profile, x_start, l_d)?;
    let q0 = JointState::symmetric_from_length(&geom, l_d, 0.0, 0.0)?;
    let mut tau = knee_lever(&geom, &q0) * cfg.height.static_load();
    let mut plant = Plant::new(cfg.plant, geom, profile.clone(), state)?;
    let mut sensors = Sensors::new(&cfg.plant, geom, period, cfg.run.seed)?;
    let mut ctrl = Controller::new(
        mode,
        geom,
        cfg.height,
        cfg.estimator,
        cfg.contact,
        cfg.admittance,
        cfg.run.hold_max_ticks,
        l_d,
    )?;

    let ticks = (duration_s / period).round() as usize;
    let mut trace = SimTrace::with_capacity(ticks);
    for _ in 0..ticks {
        let s = *plant.state();
        let readings = sensors.read(&s, tau)?;
        let out = ctrl.tick(&readings)?;
        tau = out.tau_knee;
        trace.push(TraceRecord {
            t: s.t,
            z_head: s.z_head,
            vz_head: s.vz_head,
            fz_est: out.fz_est,
            fz_true: s.f_normal_true,
            l_d,
            l_d_prime: out.l_d_prime,
            l_est: readings.l_est,
            tau_knee: out.tau_knee,
            contact: out.decision.status == ContactStatus::OnGround,
        });
        for _ in 0..substeps {
            plant.step(tau)?;
        }
    }
    Ok(trace)
}

/// Traversal time for a scenario: lead-in, feature and run-out at the
/// forward speed.
pub fn scenario_duration(cfg: &Config, profile: &TerrainProfile) -> f64 {
    (cfg.run.lead_in_m + profile.extent() + cfg.run.run_out_m) / cfg.plant.forward_speed
}

pub fn scenario_profile(cfg: &Config, scenario: Scenario) -> Result<TerrainProfile> {
    TerrainProfile::build(scenario.terrain_kind(), &cfg.terrain)
}

pub fn run_scenario(cfg: &Config, scenario: Scenario, mode: Mode) -> Result<SimTrace> {
    let profile = scenario_profile(cfg, scenario)?;
    simulate(cfg, &profile, mode, -cfg.run.lead_in_m, scenario_duration(cfg, &profile))
}

/// Head height the controller settles to on flat ground.
pub fn calibrate(cfg: &Config, mode: Mode) -> Result<f64> {
    let trace = simulate(cfg, &TerrainProfile::Flat, mode, 0.0, cfg.run.calibration_s)?;
    trace.records.last().map(|r| r.z_head).ok_or(Error::EmptySeries)
}

#[derive(Debug, Clone)]
pub struct ModeRun {
    pub mode: Mode,
    pub trace: SimTrace,
    pub reference_height: f64,
    pub metrics: ModeMetrics,
}

pub fn run_mode(cfg: &Config, scenario: Scenario, mode: Mode) -> Result<ModeRun> {
    let reference_height = calibrate(cfg, mode)?;
    let trace = run_scenario(cfg, scenario, mode)?;
    let metrics = ModeMetrics::of_trace(&trace, reference_height, cfg.run.transient_s)?;
    Ok(ModeRun {
        mode,
        trace,
        reference_height,
        metrics,
    })
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub scenario: Scenario,
    pub baseline: Option<ModeRun>,
    pub proposed: Option<ModeRun>,
    pub report: MetricsReport,
}

/// Run each requested mode on its own thread and compare.
pub fn run_experiment(cfg: &Config, scenario: Scenario, modes: &[Mode]) -> Result<ExperimentResult> {
    let runs: Vec<Result<ModeRun>> = std::thread::scope(|s| {
        let handles: Vec<_> = modes
            .iter()
            .map(|&mode| s.spawn(move || run_mode(cfg, scenario, mode)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    });
    let mut baseline = None;
    let mut proposed = None;
    for run in runs {
        let run = run?;
        match run.mode {
            Mode::Baseline => baseline = Some(run),
            Mode::Proposed => proposed = Some(run),
        }
    }
    let report = MetricsReport::build(
        scenario.name(),
        cfg.run.transient_s,
        baseline.as_ref().map(|r| (&r.metrics, r.reference_height)),
        proposed.as_ref().map(|r| (&r.metrics, r.reference_height)),
    );
    Ok(ExperimentResult {
        scenario,
        baseline,
        proposed,
        report,
    })
}

impl ExperimentResult {
    /// Write `trace_<mode>.csv`, `plot_<mode>.csv`, `report.txt` and
    /// `report.json` into `dir`.
    pub fn write(&self, dir: &Path, plot_stride: usize) -> Result<()> {
        fs::create_dir_all(dir)?;
        for run in [&self.baseline, &self.proposed].into_iter().flatten() {
            let name = run.mode.name();
            let f = fs::File::create(dir.join(format!("trace_{name}.csv")))?;
            run.trace.write_csv(BufWriter::new(f))?;
            let f = fs::File::create(dir.join(format!("plot_{name}.csv")))?;
            run.trace.write_csv_strided(BufWriter::new(f), plot_stride)?;
        }
        fs::write(dir.join("report.txt"), self.report.to_text())?;
        fs::write(dir.join("report.json"), self.report.to_json()?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names() {
        for sc in Scenario::ALL {
            assert_eq!(sc.name().parse::<Scenario>().unwrap(), sc);
        }
        assert!("exp4".parse::<Scenario>().is_err());
    }

    #[test]
    fn flat_calibration_is_close_to_geometry() {
        let cfg = Config::default().resolved().unwrap();
        let z = calibrate(&cfg, Mode::Baseline).unwrap();
        let nominal = cfg.plant.wheel_radius + cfg.run.leg_length_ref;
        assert!((z - nominal).abs() < 2e-3, "{z} vs {nominal}");
    }
}
