//! Fixed-step sagittal plant: a point-mass head on a massless telescoping leg
//! whose wheel rolls over a terrain profile at constant speed.
//!
//! The knee torque is turned into a vertical leg force through the knee
//! lever of the symmetric posture. The head integrates `m z̈ = F - m g` with
//! semi-implicit Euler. The wheel carries no mass, so the ground penalty
//! `k_g p + c_g ṗ` always balances the leg force while in contact. It is
//! advanced with a backward-Euler step. A leg force that would pull on the
//! ground lifts the wheel off; in flight the leg keeps its length and the
//! head falls freely until the wheel touches down again.

pub mod sensors;
pub mod terrain;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::leg_model::{JointState, LegGeometry};

pub use sensors::{SensorReadings, Sensors};
pub use terrain::{terrain_height, TerrainKind, TerrainParams, TerrainProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantParams {
    pub head_mass: f64,
    pub wheel_radius: f64,
    pub forward_speed: f64,
    pub gravity_g: f64,
    pub dt: f64,
    pub ground_stiffness: f64,
    pub ground_damping: f64,
    pub imu_noise_std: f64,
    pub encoder_noise_std: f64,
    pub torque_noise_std: f64,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            head_mass: 3.0,
            wheel_radius: 0.05,
            forward_speed: 0.5,
            gravity_g: crate::GRAVITY,
            dt: 1e-3,
            ground_stiffness: 5e4,
            ground_damping: 500.0,
            imu_noise_std: 0.0,
            encoder_noise_std: 0.0,
            torque_noise_std: 0.0,
        }
    }
}

impl PlantParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("plant.head_mass", self.head_mass),
            ("plant.wheel_radius", self.wheel_radius),
            ("plant.gravity_g", self.gravity_g),
            ("plant.dt", self.dt),
            ("plant.ground_stiffness", self.ground_stiffness),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("plant.forward_speed", self.forward_speed),
            ("plant.ground_damping", self.ground_damping),
            ("plant.imu_noise_std", self.imu_noise_std),
            ("plant.encoder_noise_std", self.encoder_noise_std),
            ("plant.torque_noise_std", self.torque_noise_std),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Ground penetration that carries `force` at rest.
    pub fn static_penetration(&self, force: f64) -> f64 {
        force.max(0.0) / self.ground_stiffness
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimState {
    pub tick: usize,
    pub t: f64,
    pub x_wheel: f64,
    pub z_wheel: f64,
    pub z_head: f64,
    pub vz_head: f64,
    /// Symmetric joint configuration reconstructed from the leg length.
    pub q: JointState,
    pub in_contact: bool,
    pub f_normal_true: f64,
    pub penetration: f64,
    pub leg_length: f64,
    pub leg_rate: f64,
}

impl SimState {
    /// Standing still at `x_wheel` with leg length `leg_length`, the ground
    /// already compressed by the head weight.
    pub fn settled(
        params: &PlantParams,
        geom: &LegGeometry,
        profile: &TerrainProfile,
        x_wheel: f64,
        leg_length: f64,
    ) -> Result<Self> {
        params.validate()?;
        let q = JointState::symmetric_from_length(geom, leg_length, 0.0, 0.0)?;
        let weight = params.head_mass * params.gravity_g;
        let penetration = params.static_penetration(weight);
        let z_wheel = profile.height(x_wheel) + params.wheel_radius - penetration;
        Ok(Self {
            tick: 0,
            t: 0.0,
            x_wheel,
            z_wheel,
            z_head: z_wheel + leg_length,
            vz_head: 0.0,
            q,
            in_contact: true,
            f_normal_true: weight,
            penetration,
            leg_length,
            leg_rate: 0.0,
        })
    }
}

/// Vertical force the leg exerts on the head for a knee torque, `τ / J22`.
pub fn leg_force(geom: &LegGeometry, leg_length: f64, tau_knee: f64) -> Result<f64> {
    let q = JointState::symmetric_from_length(geom, leg_length, 0.0, 0.0)?;
    let lever = crate::height_controller::knee_lever(geom, &q);
    if lever.abs() < 1e-9 {
        return Err(Error::LegFolded(leg_length));
    }
    Ok(tau_knee / lever)
}

/// Advance the plant by one `dt` under a constant knee torque.
pub fn step_plant(
    state: &SimState,
    params: &PlantParams,
    geom: &LegGeometry,
    tau_knee: f64,
    profile: &TerrainProfile,
) -> Result<SimState> {
    let tick = state.tick + 1;
    let fault = |reason: String| Error::SimulationFault { tick, reason };
    if !tau_knee.is_finite() {
        return Err(fault("non-finite knee torque".into()));
    }
    let dt = params.dt;
    let m = params.head_mass;
    let x_wheel = state.x_wheel + params.forward_speed * dt;
    let ground = profile.height(x_wheel) + params.wheel_radius;

    let mut next = SimState {
        tick,
        t: tick as f64 * dt,
        x_wheel,
        ..*state
    };

    let support = if state.in_contact {
        leg_force(geom, state.leg_length, tau_knee).map_err(|e| fault(e.to_string()))?
    } else {
        0.0
    };

    if state.in_contact && support > 0.0 {
        let (k, c) = (params.ground_stiffness, params.ground_damping);
        let penetration = ((c * state.penetration + dt * support) / (c + dt * k)).max(0.0);
        next.vz_head = state.vz_head + dt * (support / m - params.gravity_g);
        next.z_head = state.z_head + dt * next.vz_head;
        next.penetration = penetration;
        next.z_wheel = ground - penetration;
        next.leg_length = next.z_head - next.z_wheel;
        next.f_normal_true = support;
        next.in_contact = true;
    } else {
        next.vz_head = state.vz_head - dt * params.gravity_g;
        next.z_head = state.z_head + dt * next.vz_head;
        next.penetration = 0.0;
        next.f_normal_true = 0.0;
        let hanging = next.z_head - state.leg_length;
        if hanging <= ground && !state.in_contact {
            next.z_wheel = ground;
            next.leg_length = next.z_head - ground;
            next.in_contact = true;
        } else {
            next.z_wheel = hanging;
            next.leg_length = state.leg_length;
            next.in_contact = false;
        }
    }

    let (lo, hi) = geom.length_limits();
    if !(next.leg_length >= lo && next.leg_length <= hi) {
        return Err(fault(format!(
            "leg length {:.6} m outside [{lo:.4}, {hi:.4}]",
            next.leg_length
        )));
    }
    let rate = (next.leg_length - state.leg_length) / dt;
    let accel = (rate - state.leg_rate) / dt;
    next.leg_rate = rate;
    next.q = JointState::symmetric_from_length(geom, next.leg_length, rate, accel)
        .map_err(|e| fault(e.to_string()))?;
    if !(next.z_head.is_finite() && next.vz_head.is_finite() && next.q.is_finite()) {
        return Err(fault("non-finite state".into()));
    }
    Ok(next)
}

/// Owning wrapper around [`step_plant`].
#[derive(Debug, Clone)]
pub struct Plant {
    params: PlantParams,
    geom: LegGeometry,
    profile: TerrainProfile,
    state: SimState,
}

impl Plant {
    pub fn new(params: PlantParams, geom: LegGeometry, profile: TerrainProfile, state: SimState) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            geom,
            profile,
            state,
        })
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn params(&self) -> &PlantParams {
        &self.params
    }

    pub fn profile(&self) -> &TerrainProfile {
        &self.profile
    }

    pub fn step(&mut self, tau_knee: f64) -> Result<&SimState> {
        self.state = step_plant(&self.state, &self.params, &self.geom, tau_knee, &self.profile)?;
        Ok(&self.state)
    }
}
