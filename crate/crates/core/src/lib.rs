//! Head-height stabilization for a wheeled biped in the sagittal plane.
//!
//! The crate holds the leg kinematics, a Table-driven contact detector, the
//! Jacobian-transpose force estimator, the admittance filter that reshapes
//! the leg-length reference, the PD height controller, a penalty-contact
//! plant with terrain generators and the experiment harness that compares
//! the baseline and proposed controllers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admittance;
pub mod config;
pub mod contact_detector;
pub mod error;
pub mod force_estimator;
pub mod height_controller;
pub mod leg_model;
pub mod metrics_harness;
pub mod pipeline;
pub mod plant_sim;

pub use config::Config;
pub use error::{Error, Result};
pub use pipeline::Mode;

/// Standard gravity, m/s².
pub const GRAVITY: f64 = 9.81;

pub fn default_gravity() -> f64 {
    GRAVITY
}
