//! One control tick: contact detection, force estimation, admittance shaping
//! and height tracking.

use serde::{Deserialize, Serialize};

use crate::admittance::{AdmittanceFilter, AdmittanceParams};
use crate::contact_detector::{gate, ContactDecision, ContactDetector, ContactParams, ContactStatus, Gate};
use crate::error::Result;
use crate::force_estimator::{contact_force, EstimatorParams, ForceHold};
use crate::height_controller::{track, HeightCommand, HeightGains};
use crate::leg_model::LegGeometry;
use crate::plant_sim::SensorReadings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Height controller tracking the operator reference only.
    Baseline,
    /// Estimator and admittance reshape the reference first.
    Proposed,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::Proposed => "proposed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub tau_knee: f64,
    pub l_d_prime: f64,
    /// Latest valid vertical force estimate (held across invalid ticks).
    pub fz_est: f64,
    pub decision: ContactDecision,
    pub gate: Gate,
}

#[derive(Debug, Clone)]
pub struct Controller {
    mode: Mode,
    geom: LegGeometry,
    gains: HeightGains,
    estimator: EstimatorParams,
    detector: ContactDetector,
    filter: AdmittanceFilter,
    hold: ForceHold,
    l_d: f64,
    load_offset: f64,
    last_fz: f64,
}

impl Controller {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mode: Mode,
        geom: LegGeometry,
        gains: HeightGains,
        estimator: EstimatorParams,
        contact: ContactParams,
        admittance: AdmittanceParams,
        hold_max_ticks: u32,
        l_d: f64,
    ) -> Result<Self> {
        gains.validate()?;
        estimator.validate()?;
        let (lo, hi) = geom.length_limits();
        let filter = AdmittanceFilter::new(
            admittance,
            admittance.length_min.unwrap_or(lo),
            admittance.length_max.unwrap_or(hi),
        )?;
        Ok(Self {
            mode,
            geom,
            gains,
            estimator,
            detector: ContactDetector::new(contact)?,
            filter,
            hold: ForceHold::new(hold_max_ticks),
            l_d,
            load_offset: admittance.load_offset.unwrap_or_else(|| gains.static_load()),
            last_fz: gains.static_load(),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn reference(&self) -> f64 {
        self.l_d
    }

    pub fn set_reference(&mut self, l_d: f64) {
        self.l_d = l_d;
    }

    pub fn tick(&mut self, r: &SensorReadings) -> Result<ControlOutput> {
        let decision = self.detector.update(&r.accel);
        let g = gate(decision);
        let estimate = contact_force(&self.geom, &r.joints, &r.torque, r.accel.head_zdd, &self.estimator)?;
        if estimate.valid {
            self.last_fz = estimate.f_z;
        }

        let l_d_prime = match self.mode {
            Mode::Baseline => self.l_d,
            Mode::Proposed => self.shape(decision, g, estimate.valid.then_some(estimate.f_z)),
        };

        let cmd = HeightCommand {
            l_d: l_d_prime,
            dl_d: 0.0,
            ddl_d: 0.0,
            l_est: r.l_est,
            dl_est: r.dl_est,
        };
        Ok(ControlOutput {
            tau_knee: track(&self.gains, &cmd, &self.geom, &r.joints),
            l_d_prime,
            fz_est: self.last_fz,
            decision,
            gate: g,
        })
    }

    fn shape(&mut self, decision: ContactDecision, g: Gate, fz: Option<f64>) -> f64 {
        if decision.status == ContactStatus::OffGround {
            self.filter.reset();
            self.hold.clear();
            return self.l_d;
        }
        let force = match (g, fz) {
            (Gate::RunEstimator, Some(f)) => {
                self.hold.store(f);
                f
            }
            _ => self.hold.hold().unwrap_or(self.load_offset),
        };
        self.filter.step(force - self.load_offset, self.l_d)
    }
}
