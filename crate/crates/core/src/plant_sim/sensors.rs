//! Proprioceptive sensor models sampled at the controller period.
//!
//! The IMU reports specific force: the finite-differenced head acceleration
//! plus `g`, so a head at rest reads `g`. Encoders return the plant's joint
//! angles; rates and accelerations are finite differences of the encoder
//! values over the sampling period.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{PlantParams, SimState};
use crate::contact_detector::AccelSample;
use crate::error::{invalid, Result};
use crate::force_estimator::TorqueReading;
use crate::leg_model::{leg_length, wheel_acceleration, JointState, LegGeometry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorReadings {
    pub accel: AccelSample,
    pub joints: JointState,
    pub torque: TorqueReading,
    pub l_est: f64,
    pub dl_est: f64,
}

#[derive(Debug, Clone)]
struct Noise {
    rng: ChaCha8Rng,
    imu: Option<Normal<f64>>,
    encoder: Option<Normal<f64>>,
    torque: Option<Normal<f64>>,
}

impl Noise {
    fn draw(&mut self, which: fn(&Self) -> Option<Normal<f64>>) -> f64 {
        match which(self) {
            Some(d) => d.sample(&mut self.rng),
            None => 0.0,
        }
    }
}

fn normal(name: &'static str, std: f64) -> Result<Option<Normal<f64>>> {
    if std == 0.0 {
        return Ok(None);
    }
    Normal::new(0.0, std)
        .map(Some)
        .map_err(|e| invalid(name, e.to_string()))
}

#[derive(Debug, Clone)]
pub struct Sensors {
    geom: LegGeometry,
    period: f64,
    gravity_g: f64,
    noise: Noise,
    prev_vz: Option<f64>,
    prev_q: Option<(f64, f64)>,
    prev_dq: (f64, f64),
    prev_l: Option<f64>,
}

impl Sensors {
    pub fn new(params: &PlantParams, geom: LegGeometry, period: f64, seed: u64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(invalid("sensors.period", "must be > 0"));
        }
        Ok(Self {
            geom,
            period,
            gravity_g: params.gravity_g,
            noise: Noise {
                rng: ChaCha8Rng::seed_from_u64(seed),
                imu: normal("plant.imu_noise_std", params.imu_noise_std)?,
                encoder: normal("plant.encoder_noise_std", params.encoder_noise_std)?,
                torque: normal("plant.torque_noise_std", params.torque_noise_std)?,
            },
            prev_vz: None,
            prev_q: None,
            prev_dq: (0.0, 0.0),
            prev_l: None,
        })
    }

    /// Sample all sensors. `tau_applied` is the knee torque currently held
    /// on the actuator. The first call reports zero rates.
    pub fn read(&mut self, state: &SimState, tau_applied: f64) -> Result<SensorReadings> {
        let t = self.period;
        let kinematic = self.prev_vz.map_or(0.0, |v| (state.vz_head - v) / t);
        self.prev_vz = Some(state.vz_head);
        let head_zdd = kinematic + self.gravity_g + self.noise.draw(|n| n.imu);

        let q1 = state.q.q1 + self.noise.draw(|n| n.encoder);
        let q2 = state.q.q2 + self.noise.draw(|n| n.encoder);
        let (dq1, dq2) = match self.prev_q {
            Some((p1, p2)) => ((q1 - p1) / t, (q2 - p2) / t),
            None => (0.0, 0.0),
        };
        let (ddq1, ddq2) = if self.prev_q.is_some() {
            ((dq1 - self.prev_dq.0) / t, (dq2 - self.prev_dq.1) / t)
        } else {
            (0.0, 0.0)
        };
        self.prev_q = Some((q1, q2));
        self.prev_dq = (dq1, dq2);
        let joints = JointState { q1, q2, dq1, dq2, ddq1, ddq2 };

        let l_est = leg_length(&self.geom, &joints)?;
        let dl_est = self.prev_l.map_or(0.0, |l| (l_est - l) / t);
        self.prev_l = Some(l_est);

        let (_, wheel_az) = wheel_acceleration(&self.geom, &joints);
        Ok(SensorReadings {
            accel: AccelSample {
                head_zdd,
                wheel_az,
                gravity_g: self.gravity_g,
            },
            joints,
            torque: TorqueReading::knee_only(tau_applied + self.noise.draw(|n| n.torque)),
            l_est,
            dl_est,
        })
    }
}
