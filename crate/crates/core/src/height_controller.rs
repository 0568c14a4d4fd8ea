//! Leg-length tracking by PD + feedforward with gravity compensation.
//!
//! `ΔF = L̈_d + k_p (L_d - L) + k_d (L̇_d - L̇)` and the knee torque is the
//! vertical lifting force `ΔF + m_H g` mapped through the knee column of the
//! leg Jacobian, `τ_knee = L sin(q1 + q2) (ΔF + m_H g)`.
//!
//! The formulas are applied exactly as written. `ΔF` mixes an acceleration
//! term with gain-weighted length errors, so `k_p` and `k_d` effectively carry
//! units of N/m and N·s/m with a unit-mass feedforward.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::leg_model::{jacobian, JointState, LegGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeightGains {
    pub kp: f64,
    pub kd: f64,
    pub tau_max: f64,
    #[serde(rename = "m_H")]
    pub head_mass: f64,
    #[serde(skip, default = "crate::default_gravity")]
    pub gravity_g: f64,
}

impl Default for HeightGains {
    fn default() -> Self {
        Self {
            kp: 400.0,
            kd: 40.0,
            tau_max: 30.0,
            head_mass: 3.0,
            gravity_g: crate::GRAVITY,
        }
    }
}

impl HeightGains {
    pub fn validate(&self) -> Result<()> {
        if !(self.kp > 0.0 && self.kp.is_finite()) {
            return Err(invalid("height.kp", "must be > 0"));
        }
        if !(self.kd >= 0.0 && self.kd.is_finite()) {
            return Err(invalid("height.kd", "must be >= 0"));
        }
        if !(self.head_mass > 0.0 && self.head_mass.is_finite()) {
            return Err(invalid("height.m_H", "must be > 0"));
        }
        if !(self.tau_max > 0.0) {
            return Err(invalid("height.tau_max", "must be > 0"));
        }
        Ok(())
    }

    /// Static load the feedforward term supports, `m_H g`.
    pub fn static_load(&self) -> f64 {
        self.head_mass * self.gravity_g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeightCommand {
    pub l_d: f64,
    pub dl_d: f64,
    pub ddl_d: f64,
    pub l_est: f64,
    pub dl_est: f64,
}

pub fn delta_force(gains: &HeightGains, cmd: &HeightCommand) -> f64 {
    cmd.ddl_d + gains.kp * (cmd.l_d - cmd.l_est) + gains.kd * (cmd.dl_d - cmd.dl_est)
}

/// Knee lever arm for a vertical force, the `(z, knee)` Jacobian entry.
pub fn knee_lever(geom: &LegGeometry, q: &JointState) -> f64 {
    jacobian(geom, q)[(1, 1)]
}

pub fn knee_torque(geom: &LegGeometry, q: &JointState, gains: &HeightGains, delta_f: f64) -> f64 {
    knee_lever(geom, q) * (delta_f + gains.static_load())
}

/// `knee_torque(delta_force(..))` saturated to `±tau_max`.
pub fn track(gains: &HeightGains, cmd: &HeightCommand, geom: &LegGeometry, q: &JointState) -> f64 {
    knee_torque(geom, q, gains, delta_force(gains, cmd)).clamp(-gains.tau_max, gains.tau_max)
}
