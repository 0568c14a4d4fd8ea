//! Admittance shaping of the leg-length reference.
//!
//! The correction `ΔL` obeys `K ΔL + B ΔL̇ + M ΔL̈ = k_ad F`. Backward
//! differences at period `T` turn this into
//!
//! ```text
//! A0 ΔL[k] + A1 ΔL[k-1] + A2 ΔL[k-2] = k_ad T² F[k]
//! A0 = M + B T + K T²,  A1 = -(2M + B T),  A2 = M
//! ```
//!
//! and the corrected reference is `L'[k] = L[k] + ΔL[k]`, clamped to the
//! mechanically reachable range.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdmittanceParams {
    #[serde(rename = "K")]
    pub stiffness: f64,
    #[serde(rename = "B")]
    pub damping: f64,
    #[serde(rename = "M")]
    pub inertia: f64,
    pub k_ad: f64,
    #[serde(rename = "T")]
    pub period: f64,
    /// Lower clamp on the corrected reference; `None` means `0.1 · 2L`.
    #[serde(rename = "L_min", default, skip_serializing_if = "Option::is_none")]
    pub length_min: Option<f64>,
    /// Upper clamp on the corrected reference; `None` means `0.98 · 2L`.
    #[serde(rename = "L_max", default, skip_serializing_if = "Option::is_none")]
    pub length_max: Option<f64>,
    /// Static load subtracted from the force before filtering; `None` means
    /// the head weight `m_H g` known to the height controller.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_offset: Option<f64>,
}

impl Default for AdmittanceParams {
    fn default() -> Self {
        Self {
            stiffness: 2000.0,
            damping: 1500.0,
            inertia: 2.0,
            k_ad: -300.0,
            period: 1e-3,
            length_min: None,
            length_max: None,
            load_offset: None,
        }
    }
}

impl AdmittanceParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.stiffness, self.damping, self.inertia, self.k_ad, self.period]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(invalid("admittance", "parameters must be finite"));
        }
        if self.stiffness <= 0.0 {
            return Err(invalid("admittance.K", "must be > 0"));
        }
        if self.damping < 0.0 {
            return Err(invalid("admittance.B", "must be >= 0"));
        }
        if self.inertia < 0.0 {
            return Err(invalid("admittance.M", "must be >= 0"));
        }
        if self.period <= 0.0 {
            return Err(invalid("admittance.T", "must be > 0"));
        }
        Ok(())
    }

    /// Steady-state correction per newton of input force, `k_ad / K`.
    pub fn static_gain(&self) -> f64 {
        self.k_ad / self.stiffness
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

pub fn coefficients(params: &AdmittanceParams) -> Coefficients {
    let (m, b, k, t) = (params.inertia, params.damping, params.stiffness, params.period);
    Coefficients {
        a0: m + b * t + k * t * t,
        a1: -(2.0 * m + b * t),
        a2: m,
    }
}

impl Coefficients {
    /// Roots of `A0 z² + A1 z + A2` (a single root at `-A1/A0` when `A2 = 0`
    /// is reported twice, the second copy being the trivial root at zero).
    pub fn characteristic_roots(&self) -> [Complex<f64>; 2] {
        let disc = self.a1 * self.a1 - 4.0 * self.a0 * self.a2;
        let two_a = 2.0 * self.a0;
        if disc >= 0.0 {
            let s = disc.sqrt();
            [
                Complex::new((-self.a1 + s) / two_a, 0.0),
                Complex::new((-self.a1 - s) / two_a, 0.0),
            ]
        } else {
            let s = (-disc).sqrt();
            [
                Complex::new(-self.a1 / two_a, s / two_a),
                Complex::new(-self.a1 / two_a, -s / two_a),
            ]
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        let [r1, r2] = self.characteristic_roots();
        r1.norm().max(r2.norm())
    }
}

/// Stateful second-order filter producing the corrected reference.
#[derive(Debug, Clone)]
pub struct AdmittanceFilter {
    params: AdmittanceParams,
    coeffs: Coefficients,
    length_min: f64,
    length_max: f64,
    // ΔL[k], ΔL[k-1]
    history: [f64; 2],
}

impl AdmittanceFilter {
    pub fn new(params: AdmittanceParams, length_min: f64, length_max: f64) -> Result<Self> {
        params.validate()?;
        if !(length_min.is_finite() && length_max.is_finite() && length_min < length_max) {
            return Err(invalid("admittance.L_min/L_max", "need L_min < L_max"));
        }
        let coeffs = coefficients(&params);
        if coeffs.a0 <= 0.0 {
            return Err(invalid("admittance", "A0 = M + BT + KT² must be > 0"));
        }
        let sum = coeffs.a0 + coeffs.a1 + coeffs.a2;
        let kt2 = params.stiffness * params.period * params.period;
        debug_assert!((sum - kt2).abs() <= 1e-12 * coeffs.a0.abs().max(1.0));
        if coeffs.spectral_radius() >= 1.0 {
            return Err(invalid("admittance", "difference equation is not stable"));
        }
        Ok(Self {
            params,
            coeffs,
            length_min,
            length_max,
            history: [0.0; 2],
        })
    }

    pub fn params(&self) -> &AdmittanceParams {
        &self.params
    }

    pub fn coefficients(&self) -> Coefficients {
        self.coeffs
    }

    pub fn set_params(&mut self, params: AdmittanceParams) -> Result<()> {
        let rebuilt = Self::new(params, self.length_min, self.length_max)?;
        self.params = rebuilt.params;
        self.coeffs = rebuilt.coeffs;
        Ok(())
    }

    /// Latest correction `ΔL[k]`.
    pub fn correction(&self) -> f64 {
        self.history[0]
    }

    /// Advance one period with force `force` and return the corrected reference.
    pub fn step(&mut self, force: f64, reference: f64) -> f64 {
        let Coefficients { a0, a1, a2 } = self.coeffs;
        let t = self.params.period;
        let [d1, d2] = self.history;
        let d0 = (self.params.k_ad * t * t * force - a1 * d1 - a2 * d2) / a0;
        self.history = [d0, d1];
        self.clamp(reference + d0)
    }

    /// Reference with the current correction applied, without stepping.
    pub fn corrected(&self, reference: f64) -> f64 {
        self.clamp(reference + self.history[0])
    }

    pub fn reset(&mut self) {
        self.history = [0.0; 2];
    }

    pub fn clamp(&self, length: f64) -> f64 {
        length.clamp(self.length_min, self.length_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(m: f64, b: f64, k: f64, t: f64) -> AdmittanceParams {
        AdmittanceParams {
            stiffness: k,
            damping: b,
            inertia: m,
            period: t,
            k_ad: 1.0,
            ..Default::default()
        }
    }

    #[test]
    fn coefficient_examples() {
        let c = coefficients(&params(1.0, 10.0, 100.0, 0.01));
        assert_relative_eq!(c.a0, 1.11, max_relative = 1e-14);
        assert_relative_eq!(c.a1, -2.1, max_relative = 1e-14);
        assert_relative_eq!(c.a2, 1.0);

        let c = coefficients(&params(0.0, 0.0, 1.0, 1.0));
        assert_eq!((c.a0, c.a1, c.a2), (1.0, 0.0, 0.0));
    }

    #[test]
    fn zero_force_is_identity() {
        let mut f = AdmittanceFilter::new(AdmittanceParams::default(), 0.02, 0.3).unwrap();
        for _ in 0..1000 {
            assert_eq!(f.step(0.0, 0.2), 0.2);
        }
    }

    #[test]
    fn constant_force_reaches_static_gain() {
        let p = AdmittanceParams { k_ad: 1.0, damping: 120.0, ..Default::default() };
        let mut f = AdmittanceFilter::new(p, -1.0, 1.0).unwrap();
        for _ in 0..5000 {
            f.step(10.0, 0.0);
        }
        assert_relative_eq!(f.correction(), 10.0 / 2000.0, max_relative = 1e-9);
    }

    #[test]
    fn output_is_clamped() {
        let mut f = AdmittanceFilter::new(AdmittanceParams { k_ad: 1.0, ..Default::default() }, 0.05, 0.25).unwrap();
        let mut out = 0.0;
        for _ in 0..20_000 {
            out = f.step(1e6, 0.2);
        }
        assert_eq!(out, 0.25);
        f.reset();
        for _ in 0..20_000 {
            out = f.step(-1e6, 0.2);
        }
        assert_eq!(out, 0.05);
    }

    #[test]
    fn reset_clears_history() {
        let mut f = AdmittanceFilter::new(AdmittanceParams::default(), 0.0, 1.0).unwrap();
        for _ in 0..10 {
            f.step(3.0, 0.5);
        }
        assert!(f.correction() != 0.0);
        f.reset();
        assert_eq!(f.correction(), 0.0);
        f.reset();
        assert_eq!(f.correction(), 0.0);
        assert_eq!(f.step(0.0, 0.5), 0.5);
    }

    #[test]
    fn default_roots_inside_unit_circle() {
        let c = coefficients(&AdmittanceParams::default());
        assert!(c.spectral_radius() < 1.0);
        let lightly_damped = coefficients(&params(2.0, 120.0, 2000.0, 1e-3));
        assert!(lightly_damped.spectral_radius() < 1.0);
    }

    #[test]
    fn rejects_invalid() {
        assert!(AdmittanceFilter::new(params(1.0, 1.0, 0.0, 1e-3), 0.0, 1.0).is_err());
        assert!(AdmittanceFilter::new(params(-1.0, 1.0, 1.0, 1e-3), 0.0, 1.0).is_err());
        assert!(AdmittanceFilter::new(params(1.0, -1.0, 1.0, 1e-3), 0.0, 1.0).is_err());
        assert!(AdmittanceFilter::new(params(1.0, 1.0, 1.0, 0.0), 0.0, 1.0).is_err());
        assert!(AdmittanceFilter::new(params(1.0, 1.0, 1.0, 1e-3), 1.0, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn coefficient_sum_identity(m in 0.0f64..10.0, b in 0.0f64..5000.0, k in 1.0f64..1e5, t in 1e-4f64..0.1) {
            let c = coefficients(&params(m, b, k, t));
            let lhs = c.a0 + c.a1 + c.a2;
            prop_assert!((lhs - k * t * t).abs() <= 1e-12 * c.a0);
        }

        #[test]
        fn positive_params_are_stable(m in 0.0f64..10.0, b in 0.0f64..5000.0, k in 1.0f64..1e5, t in 1e-4f64..0.1) {
            prop_assert!(coefficients(&params(m, b, k, t)).spectral_radius() < 1.0);
        }
    }
}
