//! Kinematics of the two-link planar leg.
//!
//! The hip sits at the origin of the base frame `{O}`, `z` points up and the
//! leg hangs along the negative `z` axis at `q = 0`. Both links have the same
//! length. Angles are counter-clockwise positive and are never wrapped.

use nalgebra::{Matrix2, Vector2};

use crate::error::{invalid, Error, Result};

/// Link length shared by both leg segments, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegGeometry {
    link_length: f64,
}

impl LegGeometry {
    pub const DEFAULT_LINK_LENGTH: f64 = 0.14;

    pub fn new(link_length: f64) -> Result<Self> {
        if !(link_length.is_finite() && link_length > 0.0) {
            return Err(invalid("leg.link_length", format!("must be > 0, got {link_length}")));
        }
        Ok(Self { link_length })
    }

    pub fn link_length(&self) -> f64 {
        self.link_length
    }

    /// Fully extended length `2L`.
    pub fn reach(&self) -> f64 {
        2.0 * self.link_length
    }

    /// Usable hip-to-wheel range, `[0.1 · 2L, 0.98 · 2L]`.
    pub fn length_limits(&self) -> (f64, f64) {
        (0.1 * self.reach(), 0.98 * self.reach())
    }
}

impl Default for LegGeometry {
    fn default() -> Self {
        Self {
            link_length: Self::DEFAULT_LINK_LENGTH,
        }
    }
}

/// Joint angles, rates and accelerations of one leg.
///
/// `q1` is measured from the negative `z` axis to the thigh, `q2` from the
/// thigh to the shank.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JointState {
    pub q1: f64,
    pub q2: f64,
    pub dq1: f64,
    pub dq2: f64,
    pub ddq1: f64,
    pub ddq2: f64,
}

impl JointState {
    pub fn at_rest(q1: f64, q2: f64) -> Self {
        Self {
            q1,
            q2,
            ..Self::default()
        }
    }

    pub fn rates(&self) -> Vector2<f64> {
        Vector2::new(self.dq1, self.dq2)
    }

    pub fn accelerations(&self) -> Vector2<f64> {
        Vector2::new(self.ddq1, self.ddq2)
    }

    pub fn is_finite(&self) -> bool {
        [self.q1, self.q2, self.dq1, self.dq2, self.ddq1, self.ddq2]
            .iter()
            .all(|v| v.is_finite())
    }

    /// Symmetric posture that keeps the wheel directly below the hip
    /// (`q1 = -q2/2`) for a given hip-to-wheel distance and its derivatives.
    pub fn symmetric_from_length(
        geom: &LegGeometry,
        length: f64,
        length_rate: f64,
        length_accel: f64,
    ) -> Result<Self> {
        let ratio = length / geom.reach();
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(Error::LegFolded(length));
        }
        // length = 2L cos(q2/2)  =>  q2 = 2 acos(length / 2L)
        let q2 = 2.0 * ratio.acos();
        let half = 0.5 * q2;
        let sin_half = half.sin();
        // d(length)/dq2 = -L sin(q2/2)
        let dl_dq2 = -geom.link_length * sin_half;
        let (dq2, ddq2) = if dl_dq2.abs() > f64::EPSILON {
            let dq2 = length_rate / dl_dq2;
            // d2(length)/dq2^2 = -(L/2) cos(q2/2)
            let d2l = -0.5 * geom.link_length * half.cos();
            (dq2, (length_accel - d2l * dq2 * dq2) / dl_dq2)
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            q1: -half,
            q2,
            dq1: -0.5 * dq2,
            dq2,
            ddq1: -0.5 * ddq2,
            ddq2,
        })
    }
}

/// Wheel-center position and acceleration in the base frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WheelCenterState {
    pub x: f64,
    pub z: f64,
    pub a_x: f64,
    pub a_z: f64,
}

pub fn forward_kinematics(geom: &LegGeometry, q: &JointState) -> WheelCenterState {
    let l = geom.link_length;
    let q12 = q.q1 + q.q2;
    WheelCenterState {
        x: l * q.q1.sin() + l * q12.sin(),
        z: -l * q.q1.cos() - l * q12.cos(),
        ..WheelCenterState::default()
    }
}

/// Geometric Jacobian mapping joint rates to wheel-center velocity `[ẋ, ż]`.
pub fn jacobian(geom: &LegGeometry, q: &JointState) -> Matrix2<f64> {
    let l = geom.link_length;
    let q12 = q.q1 + q.q2;
    let (s1, c1) = q.q1.sin_cos();
    let (s12, c12) = q12.sin_cos();
    Matrix2::new(
        l * (c1 + c12),
        l * c12,
        l * (s1 + s12),
        l * s12,
    )
}

/// Time derivative of [`jacobian`] along the joint rates in `q`.
pub fn jacobian_dot(geom: &LegGeometry, q: &JointState) -> Matrix2<f64> {
    let l = geom.link_length;
    let q12 = q.q1 + q.q2;
    let w12 = q.dq1 + q.dq2;
    let (s1, c1) = q.q1.sin_cos();
    let (s12, c12) = q12.sin_cos();
    Matrix2::new(
        -l * (s1 * q.dq1 + s12 * w12),
        -l * s12 * w12,
        l * (c1 * q.dq1 + c12 * w12),
        l * c12 * w12,
    )
}

/// Wheel-center acceleration `J̇ q̇ + J q̈` in `{O}`.
pub fn wheel_acceleration(geom: &LegGeometry, q: &JointState) -> (f64, f64) {
    let a = jacobian_dot(geom, q) * q.rates() + jacobian(geom, q) * q.accelerations();
    (a.x, a.y)
}

/// Hip-to-wheel distance `2L cos(q2/2)`. Rejects `|q2| >= π`.
pub fn leg_length(geom: &LegGeometry, q: &JointState) -> Result<f64> {
    if !q.q2.is_finite() {
        return Err(Error::NonFinite("leg_length"));
    }
    if q.q2.abs() >= std::f64::consts::PI {
        return Err(Error::LegFolded(0.0));
    }
    Ok(geom.reach() * (0.5 * q.q2).cos())
}
