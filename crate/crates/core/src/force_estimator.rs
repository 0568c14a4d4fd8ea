//! Contact-force estimation by Jacobian transpose.
//!
//! Joint torques and the operational-space force at the wheel center are
//! related by virtual work, `τ = Jᵀ f`, so `f = (Jᵀ)⁻¹ τ`. The wheel-motor
//! torque leaks into the joints through two tuning coefficients. The vertical
//! component is then corrected for the acceleration of the head.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::leg_model::{jacobian, JointState, LegGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TorqueReading {
    pub tau_hip: f64,
    pub tau_knee: f64,
    pub tau_wheel: f64,
}

impl TorqueReading {
    pub fn knee_only(tau_knee: f64) -> Self {
        Self {
            tau_knee,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorParams {
    pub k1: f64,
    pub k2: f64,
    pub head_mass: f64,
    #[serde(skip, default = "crate::default_gravity")]
    pub gravity_g: f64,
    pub gravity_compensation: bool,
    pub singularity_floor: f64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self {
            k1: 0.0,
            k2: 0.0,
            head_mass: 0.3,
            gravity_g: crate::GRAVITY,
            gravity_compensation: true,
            singularity_floor: 0.05,
        }
    }
}

impl EstimatorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.head_mass > 0.0 && self.head_mass.is_finite()) {
            return Err(invalid("estimator.head_mass", "must be > 0"));
        }
        if !(self.singularity_floor > 0.0 && self.singularity_floor < 1.0) {
            return Err(invalid("estimator.singularity_floor", "must lie in (0, 1)"));
        }
        if !(self.k1.is_finite() && self.k2.is_finite()) {
            return Err(invalid("estimator.k1/k2", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceEstimate {
    /// Operational-space force `[f_x, f_z]` at the wheel center, N.
    pub f_xz: Vector2<f64>,
    /// Vertical contact force after head-acceleration compensation, N.
    pub f_z: f64,
    pub valid: bool,
}

pub fn effective_joint_torque(reading: &TorqueReading, params: &EstimatorParams) -> Vector2<f64> {
    Vector2::new(
        reading.tau_hip + params.k1 * reading.tau_wheel,
        reading.tau_knee + params.k2 * reading.tau_wheel,
    )
}

/// Estimate the contact force for the current posture.
///
/// `head_zdd` is the IMU reading (specific force, `g` at rest). With
/// `gravity_compensation` the head term uses `head_zdd - g`, otherwise the raw
/// reading. Near the straight-leg singularity the estimate comes back with
/// `valid = false` and zero force.
pub fn contact_force(
    geom: &LegGeometry,
    q: &JointState,
    reading: &TorqueReading,
    head_zdd: f64,
    params: &EstimatorParams,
) -> Result<ForceEstimate> {
    let inputs = [
        q.q1,
        q.q2,
        reading.tau_hip,
        reading.tau_knee,
        reading.tau_wheel,
        head_zdd,
    ];
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("contact_force"));
    }
    if q.q2.sin().abs() < params.singularity_floor {
        return Ok(ForceEstimate {
            f_xz: Vector2::zeros(),
            f_z: 0.0,
            valid: false,
        });
    }
    let tau = effective_joint_torque(reading, params);
    let jt = jacobian(geom, q).transpose();
    let f_xz = jt
        .lu()
        .solve(&tau)
        .ok_or(Error::NonFinite("contact_force: singular Jacobian"))?;
    let head_acc = if params.gravity_compensation {
        head_zdd - params.gravity_g
    } else {
        head_zdd
    };
    Ok(ForceEstimate {
        f_xz,
        f_z: f_xz.y - params.head_mass * head_acc,
        valid: true,
    })
}

/// Last-valid-value cache used while the estimator is skipped or singular.
#[derive(Debug, Clone, Default)]
pub struct ForceHold {
    last: Option<f64>,
    age: u32,
    max_age: u32,
}

impl ForceHold {
    pub const DEFAULT_MAX_AGE: u32 = 50;

    pub fn new(max_age: u32) -> Self {
        Self {
            last: None,
            age: 0,
            max_age,
        }
    }

    pub fn store(&mut self, f_z: f64) {
        self.last = Some(f_z);
        self.age = 0;
    }

    /// Value to use on a tick without a fresh estimate. `None` once the held
    /// value is older than `max_age` ticks.
    pub fn hold(&mut self) -> Option<f64> {
        self.age = self.age.saturating_add(1);
        if self.age > self.max_age {
            self.last = None;
        }
        self.last
    }

    pub fn clear(&mut self) {
        self.last = None;
        self.age = 0;
    }
}
