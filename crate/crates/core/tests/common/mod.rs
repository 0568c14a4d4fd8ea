//! Independent oracles shared by the integration and acceptance tests.
//! They rely only on forward kinematics and the Jacobian, both of which are
//! checked against closed forms first.

#![allow(dead_code)]

use headstab::leg_model::{forward_kinematics, jacobian, JointState, LegGeometry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random non-singular joint state with rates and accelerations.
pub fn random_joint_state(rng: &mut ChaCha8Rng) -> JointState {
    let q2 = loop {
        let v: f64 = rng.random_range(-2.8..2.8);
        if v.abs() > 0.2 {
            break v;
        }
    };
    JointState {
        q1: rng.random_range(-1.5..1.5),
        q2,
        dq1: rng.random_range(-3.0..3.0),
        dq2: rng.random_range(-3.0..3.0),
        ddq1: rng.random_range(-20.0..20.0),
        ddq2: rng.random_range(-20.0..20.0),
    }
}

fn position(geom: &LegGeometry, q1: f64, q2: f64) -> [f64; 2] {
    let p = forward_kinematics(geom, &JointState::at_rest(q1, q2));
    [p.x, p.z]
}

/// Central-difference Jacobian of forward kinematics, `[row][col]`.
pub fn fd_jacobian(geom: &LegGeometry, q1: f64, q2: f64, h: f64) -> [[f64; 2]; 2] {
    let a = position(geom, q1 + h, q2);
    let b = position(geom, q1 - h, q2);
    let c = position(geom, q1, q2 + h);
    let d = position(geom, q1, q2 - h);
    [
        [(a[0] - b[0]) / (2.0 * h), (c[0] - d[0]) / (2.0 * h)],
        [(a[1] - b[1]) / (2.0 * h), (c[1] - d[1]) / (2.0 * h)],
    ]
}

/// Central difference of `jacobian` along the straight joint path `q + t q̇`.
pub fn fd_jacobian_dot(geom: &LegGeometry, q: &JointState, h: f64) -> [[f64; 2]; 2] {
    let ahead = jacobian(geom, &JointState::at_rest(q.q1 + h * q.dq1, q.q2 + h * q.dq2));
    let behind = jacobian(geom, &JointState::at_rest(q.q1 - h * q.dq1, q.q2 - h * q.dq2));
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (ahead[(i, j)] - behind[(i, j)]) / (2.0 * h);
        }
    }
    out
}

/// Second central difference of the wheel position along the quadratic
/// joint trajectory `q + t q̇ + t²/2 q̈`.
pub fn fd_wheel_acceleration(geom: &LegGeometry, q: &JointState, h: f64) -> [f64; 2] {
    let at = |t: f64| {
        position(
            geom,
            q.q1 + t * q.dq1 + 0.5 * t * t * q.ddq1,
            q.q2 + t * q.dq2 + 0.5 * t * t * q.ddq2,
        )
    };
    let (p, c, m) = (at(h), at(0.0), at(-h));
    [
        (p[0] - 2.0 * c[0] + m[0]) / (h * h),
        (p[1] - 2.0 * c[1] + m[1]) / (h * h),
    ]
}

/// Relative error with an absolute floor for entries near zero.
pub fn rel_err(got: f64, want: f64, floor: f64) -> f64 {
    (got - want).abs() / want.abs().max(floor)
}

/// RK4 solution of `M x'' + B x' + K x = k_ad F` from rest under a constant
/// force, sampled at `t_end`. For `M = 0` the first-order form is used.
pub fn rk4_admittance_step(m: f64, b: f64, k: f64, k_ad: f64, force: f64, t_end: f64, h: f64) -> f64 {
    let n = (t_end / h).round() as usize;
    if m == 0.0 {
        let f = |x: f64| (k_ad * force - k * x) / b;
        let mut x = 0.0;
        for _ in 0..n {
            let k1 = f(x);
            let k2 = f(x + 0.5 * h * k1);
            let k3 = f(x + 0.5 * h * k2);
            let k4 = f(x + h * k3);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        return x;
    }
    let f = |x: f64, v: f64| (v, (k_ad * force - b * v - k * x) / m);
    let (mut x, mut v) = (0.0, 0.0);
    for _ in 0..n {
        let (a1, b1) = f(x, v);
        let (a2, b2) = f(x + 0.5 * h * a1, v + 0.5 * h * b1);
        let (a3, b3) = f(x + 0.5 * h * a2, v + 0.5 * h * b2);
        let (a4, b4) = f(x + h * a3, v + h * b3);
        x += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        v += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    }
    x
}

#[allow(clippy::needless_range_loop)]
pub fn brute_mae(s: &[f64], r: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..s.len() {
        let d = s[i] - r;
        acc += if d < 0.0 { -d } else { d };
    }
    acc / s.len() as f64
}

pub fn brute_rmse(s: &[f64], r: f64) -> f64 {
    let mut acc = 0.0;
    for v in s {
        acc += (v - r) * (v - r);
    }
    (acc / s.len() as f64).sqrt()
}

pub fn brute_p2p(s: &[f64]) -> f64 {
    let mut sorted = s.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted[sorted.len() - 1] - sorted[0]
}
