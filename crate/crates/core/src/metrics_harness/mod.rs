//! Stabilization metrics and baseline-versus-proposed reports.

pub mod experiment;
pub mod trace;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use experiment::{run_experiment, run_scenario, ExperimentResult, ModeRun, Scenario};
pub use trace::{SimTrace, TraceRecord};

pub fn mae(series: &[f64], reference: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(series.iter().map(|v| (v - reference).abs()).sum::<f64>() / series.len() as f64)
}

pub fn rmse(series: &[f64], reference: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let ss: f64 = series.iter().map(|v| (v - reference).powi(2)).sum();
    Ok((ss / series.len() as f64).sqrt())
}

pub fn p2p(series: &[f64]) -> Result<f64> {
    let (lo, hi) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(hi - lo)
}

/// Relative reduction `100 (1 - proposed / baseline)` in percent.
pub fn improvement(baseline: f64, proposed: f64) -> Result<f64> {
    if !(baseline > 0.0) {
        return Err(Error::NonPositiveBaseline(baseline));
    }
    Ok(100.0 * (1.0 - proposed / baseline))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesMetrics {
    pub mae: f64,
    pub rmse: f64,
    pub p2p: f64,
}

impl SeriesMetrics {
    pub fn of(series: &[f64], reference: f64) -> Result<Self> {
        Ok(Self {
            mae: mae(series, reference)?,
            rmse: rmse(series, reference)?,
            p2p: p2p(series)?,
        })
    }
}

/// Position and velocity metrics of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeMetrics {
    pub position: SeriesMetrics,
    pub velocity: SeriesMetrics,
}

impl ModeMetrics {
    /// Metrics over records with `t >= transient_s`, position against
    /// `reference_height` and velocity against zero.
    pub fn of_trace(trace: &SimTrace, reference_height: f64, transient_s: f64) -> Result<Self> {
        let kept: Vec<&TraceRecord> = trace.records.iter().filter(|r| r.t >= transient_s).collect();
        let z: Vec<f64> = kept.iter().map(|r| r.z_head).collect();
        let vz: Vec<f64> = kept.iter().map(|r| r.vz_head).collect();
        Ok(Self {
            position: SeriesMetrics::of(&z, reference_height)?,
            velocity: SeriesMetrics::of(&vz, 0.0)?,
        })
    }

    fn get(&self, key: MetricKey) -> f64 {
        let s = match key.quantity {
            Quantity::Position => &self.position,
            Quantity::Velocity => &self.velocity,
        };
        match key.stat {
            Stat::Mae => s.mae,
            Stat::Rmse => s.rmse,
            Stat::P2p => s.p2p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quantity {
    Position,
    Velocity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stat {
    Mae,
    Rmse,
    P2p,
}

#[derive(Debug, Clone, Copy)]
struct MetricKey {
    quantity: Quantity,
    stat: Stat,
}

const fn k(quantity: Quantity, stat: Stat) -> MetricKey {
    MetricKey { quantity, stat }
}

const METRICS: [(MetricKey, &str, &str); 6] = {
    use Quantity::*;
    use Stat::*;
    [
        (k(Position, Mae), "position_mae", "m"),
        (k(Position, Rmse), "position_rmse", "m"),
        (k(Position, P2p), "position_p2p", "m"),
        (k(Velocity, Mae), "velocity_mae", "m/s"),
        (k(Velocity, Rmse), "velocity_rmse", "m/s"),
        (k(Velocity, P2p), "velocity_p2p", "m/s"),
    ]
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: String,
    pub unit: String,
    pub baseline: Option<f64>,
    pub proposed: Option<f64>,
    /// Percent; absent when either side is missing or the baseline is zero.
    pub improvement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scenario: String,
    pub transient_s: f64,
    pub reference_height_baseline: Option<f64>,
    pub reference_height_proposed: Option<f64>,
    pub rows: Vec<MetricRow>,
}

impl MetricsReport {
    pub fn build(
        scenario: &str,
        transient_s: f64,
        baseline: Option<(&ModeMetrics, f64)>,
        proposed: Option<(&ModeMetrics, f64)>,
    ) -> Self {
        let rows = METRICS
            .iter()
            .map(|&(key, name, unit)| {
                let b = baseline.map(|(m, _)| m.get(key));
                let p = proposed.map(|(m, _)| m.get(key));
                MetricRow {
                    metric: name.to_string(),
                    unit: unit.to_string(),
                    baseline: b,
                    proposed: p,
                    improvement: match (b, p) {
                        (Some(b), Some(p)) => improvement(b, p).ok(),
                        _ => None,
                    },
                }
            })
            .collect();
        Self {
            scenario: scenario.to_string(),
            transient_s,
            reference_height_baseline: baseline.map(|(_, r)| r),
            reference_height_proposed: proposed.map(|(_, r)| r),
            rows,
        }
    }

    pub fn row(&self, metric: &str) -> Option<&MetricRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }

    pub fn improvement_of(&self, metric: &str) -> Option<f64> {
        self.row(metric).and_then(|r| r.improvement)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Flat `key = value` listing.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |v| format!("{v:.9e}"));
        let _ = writeln!(out, "# first {} s of each run excluded", self.transient_s);
        let _ = writeln!(out, "scenario = {}", self.scenario);
        let _ = writeln!(out, "transient_s = {}", self.transient_s);
        let _ = writeln!(out, "reference_height.baseline = {}", opt(self.reference_height_baseline));
        let _ = writeln!(out, "reference_height.proposed = {}", opt(self.reference_height_proposed));
        for r in &self.rows {
            let _ = writeln!(out, "{}.unit = {}", r.metric, r.unit);
            let _ = writeln!(out, "{}.baseline = {}", r.metric, opt(r.baseline));
            let _ = writeln!(out, "{}.proposed = {}", r.metric, opt(r.proposed));
            let _ = writeln!(out, "{}.improvement_pct = {}", r.metric, opt(r.improvement));
        }
        out
    }

    /// Human-readable table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4e}"));
        let _ = writeln!(out, "scenario: {} (first {} s excluded)", self.scenario, self.transient_s);
        let _ = writeln!(
            out,
            "{:<15} {:<5} {:>12} {:>12} {:>12}",
            "metric", "unit", "baseline", "proposed", "improvement"
        );
        for r in &self.rows {
            let imp = r.improvement.map_or_else(|| "-".to_string(), |v| format!("{v:.1}%"));
            let _ = writeln!(
                out,
                "{:<15} {:<5} {:>12} {:>12} {:>12}",
                r.metric,
                r.unit,
                cell(r.baseline),
                cell(r.proposed),
                imp
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn basic_values() {
        assert_eq!(mae(&[1.0, 2.0, 3.0], 0.0).unwrap(), 2.0);
        assert_eq!(mae(&[0.5, 0.5], 0.5).unwrap(), 0.0);
        assert_eq!(rmse(&[3.0, -3.0], 0.0).unwrap(), 3.0);
        assert_relative_eq!(rmse(&[1.25; 7], 1.0).unwrap(), 0.25, max_relative = 1e-15);
        assert_eq!(p2p(&[1.0, 4.0, 2.0]).unwrap(), 3.0);
        assert_eq!(p2p(&[0.0625; 4]).unwrap(), 0.0);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(mae(&[], 0.0), Err(Error::EmptySeries)));
        assert!(matches!(rmse(&[], 0.0), Err(Error::EmptySeries)));
        assert!(matches!(p2p(&[]), Err(Error::EmptySeries)));
    }

    #[test]
    fn improvement_values() {
        assert_relative_eq!(improvement(0.0103, 0.0032).unwrap(), 68.932_038_834_951_46, max_relative = 1e-12);
        assert_relative_eq!(improvement(0.0169, 0.0051).unwrap(), 69.822_485_207_100_59, max_relative = 1e-12);
        assert_eq!(improvement(0.4, 0.4).unwrap(), 0.0);
        assert!(matches!(improvement(0.0, 1.0), Err(Error::NonPositiveBaseline(_))));
        assert!(improvement(-1.0, 1.0).is_err());
    }

    #[test]
    fn report_handles_missing_side() {
        let m = ModeMetrics {
            position: SeriesMetrics { mae: 1.0, rmse: 2.0, p2p: 3.0 },
            velocity: SeriesMetrics { mae: 0.0, rmse: 0.0, p2p: 0.0 },
        };
        let r = MetricsReport::build("flat", 0.5, Some((&m, 0.3)), None);
        assert!(r.rows.iter().all(|row| row.improvement.is_none()));
        assert_eq!(r.row("position_rmse").unwrap().baseline, Some(2.0));
        let both = MetricsReport::build("flat", 0.5, Some((&m, 0.3)), Some((&m, 0.3)));
        assert_eq!(both.improvement_of("position_mae"), Some(0.0));
        // zero baseline has no defined improvement
        assert_eq!(both.improvement_of("velocity_mae"), None);
        assert!(both.to_text().contains("position_p2p.unit = m\n"));
    }

    proptest! {
        #[test]
        fn rmse_dominates_mae(v in prop::collection::vec(-10.0f64..10.0, 1..200), r in -5.0f64..5.0) {
            let a = mae(&v, r).unwrap();
            let b = rmse(&v, r).unwrap();
            prop_assert!(b >= a * (1.0 - 1e-12));
        }

        #[test]
        fn p2p_ignores_order(mut v in prop::collection::vec(-10.0f64..10.0, 1..100)) {
            let before = p2p(&v).unwrap();
            v.reverse();
            let n = v.len() / 3;
            v.rotate_left(n);
            prop_assert_eq!(p2p(&v).unwrap(), before);
            prop_assert!(before >= 0.0);
        }
    }
}
