//! Nested TOML configuration. Every section is optional and unknown keys are
//! rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::admittance::AdmittanceParams;
use crate::contact_detector::ContactParams;
use crate::error::{invalid, Error, Result};
use crate::force_estimator::{EstimatorParams, ForceHold};
use crate::height_controller::HeightGains;
use crate::leg_model::LegGeometry;
use crate::plant_sim::{PlantParams, TerrainParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LegParams {
    pub link_length: f64,
}

impl Default for LegParams {
    fn default() -> Self {
        Self {
            link_length: LegGeometry::DEFAULT_LINK_LENGTH,
        }
    }
}

/// Scenario protocol and bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunParams {
    /// Constant operator leg-length reference `L_d`.
    pub leg_length_ref: f64,
    /// Flat ground driven before the terrain feature starts at `x = 0`.
    pub lead_in_m: f64,
    /// Flat ground driven after the feature ends.
    pub run_out_m: f64,
    /// Start-up interval excluded from the metrics.
    pub transient_s: f64,
    /// Length of the flat-ground run that fixes the reference height.
    pub calibration_s: f64,
    /// Ticks a force estimate may be reused while estimation is skipped.
    pub hold_max_ticks: u32,
    /// Row stride of the plot CSV.
    pub plot_stride: usize,
    /// Sensor-noise seed.
    pub seed: u64,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            leg_length_ref: 0.2,
            lead_in_m: 1.0,
            run_out_m: 1.0,
            transient_s: 0.5,
            calibration_s: 3.0,
            hold_max_ticks: ForceHold::DEFAULT_MAX_AGE,
            plot_stride: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub leg: LegParams,
    pub plant: PlantParams,
    pub terrain: TerrainParams,
    pub contact: ContactParams,
    pub estimator: EstimatorParams,
    pub admittance: AdmittanceParams,
    pub height: HeightGains,
    pub run: RunParams,
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.resolved()
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Propagate the plant's gravity to the controller models and validate.
    pub fn resolved(mut self) -> Result<Self> {
        self.estimator.gravity_g = self.plant.gravity_g;
        self.height.gravity_g = self.plant.gravity_g;
        self.validate()?;
        Ok(self)
    }

    pub fn geometry(&self) -> Result<LegGeometry> {
        LegGeometry::new(self.leg.link_length)
    }

    pub fn validate(&self) -> Result<()> {
        let geom = self.geometry()?;
        self.plant.validate()?;
        self.contact.validate()?;
        self.estimator.validate()?;
        self.admittance.validate()?;
        self.height.validate()?;
        let ratio = self.admittance.period / self.plant.dt;
        if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-6 {
            return Err(invalid(
                "admittance.T",
                format!("must be an integer multiple of plant.dt ({} / {})", self.admittance.period, self.plant.dt),
            ));
        }
        let (lo, hi) = geom.length_limits();
        let l_d = self.run.leg_length_ref;
        if !(l_d > lo && l_d < hi) {
            return Err(invalid("run.leg_length_ref", format!("must lie in ({lo}, {hi})")));
        }
        let r = &self.run;
        if !(r.lead_in_m >= 0.0 && r.run_out_m >= 0.0 && r.transient_s >= 0.0 && r.calibration_s > 0.0) {
            return Err(invalid("run", "lengths and durations must be non-negative"));
        }
        if r.plot_stride == 0 {
            return Err(invalid("run.plot_stride", "must be >= 1"));
        }
        if self.plant.forward_speed <= 0.0 {
            return Err(invalid("plant.forward_speed", "must be > 0 for a traversal"));
        }
        Ok(())
    }

    /// Plant steps per control period.
    pub fn substeps(&self) -> usize {
        (self.admittance.period / self.plant.dt).round() as usize
    }

    /// Copy with the dotted key `key` (e.g. `admittance.k_ad`) set to `value`,
    /// given as a TOML literal. Bare words are taken as strings.
    pub fn with_override(&self, key: &str, value: &str) -> Result<Self> {
        let mut tree = toml::Value::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        let path: Vec<&str> = key.split('.').collect();
        let (last, parents) = path.split_last().ok_or_else(|| Error::Config("empty key".into()))?;
        let mut node = &mut tree;
        for part in parents {
            node = node
                .get_mut(*part)
                .filter(|v| v.is_table())
                .ok_or_else(|| Error::Config(format!("unknown config section `{part}` in `{key}`")))?;
        }
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{key}` does not name a key")))?;
        let mut parsed = parse_literal(value);
        if let (Some(toml::Value::Float(_)), toml::Value::Integer(i)) = (table.get(*last), &parsed) {
            parsed = toml::Value::Float(*i as f64);
        }
        table.insert((*last).to_string(), parsed);
        let cfg: Config = tree.try_into().map_err(|e: toml::de::Error| Error::Config(format!("{key}: {e}")))?;
        cfg.resolved()
    }
}

fn parse_literal(value: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        let cfg = Config::from_toml_str("").unwrap();
        assert_eq!(cfg, Config::default().resolved().unwrap());
    }

    #[test]
    fn partial_sections() {
        let cfg = Config::from_toml_str("[admittance]\nK = 100.0\nk_ad = 2.0\n[plant]\ngravity_g = 9.0\n").unwrap();
        assert_eq!(cfg.admittance.stiffness, 100.0);
        assert_eq!(cfg.admittance.damping, AdmittanceParams::default().damping);
        assert_eq!(cfg.height.gravity_g, 9.0);
        assert_eq!(cfg.estimator.gravity_g, 9.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Config::from_toml_str("[plant]\nmass = 3.0\n").is_err());
        assert!(Config::from_toml_str("[wheels]\nn = 2\n").is_err());
        assert!(Config::from_toml_str("[height]\ngravity_g = 9.0\n").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = Config::default().resolved().unwrap();
        let back = Config::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn dotted_override() {
        let cfg = Config::default();
        let c = cfg.with_override("admittance.k_ad", "-10").unwrap();
        assert_eq!(c.admittance.k_ad, -10.0);
        let c = cfg.with_override("admittance.L_max", "0.25").unwrap();
        assert_eq!(c.admittance.length_max, Some(0.25));
        let c = cfg.with_override("contact.debounce_ticks", "5").unwrap();
        assert_eq!(c.contact.debounce_ticks, 5);
        assert!(cfg.with_override("admittance.kad", "1").is_err());
        assert!(cfg.with_override("nothing.here", "1").is_err());
        assert!(cfg.with_override("plant.dt", "fast").is_err());
    }

    #[test]
    fn period_must_divide() {
        let mut cfg = Config::default();
        cfg.admittance.period = 2.5e-3;
        assert!(cfg.validate().is_err());
        cfg.admittance.period = 2e-3;
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.substeps(), 2);
    }
}
