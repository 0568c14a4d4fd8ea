//! Ground-contact classification from head and wheel accelerations.
//!
//! The head IMU reports specific force, so a robot standing still reads
//! `head_zdd = g`. The wheel acceleration `a_z` is the vertical component of
//! the wheel-center acceleration relative to the hip. Each signal is reduced
//! to a three-way sign with a dead-band and the pair indexes a nine-cell table.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const DEFAULT_EPS_ZDD: f64 = 2.0;
pub const DEFAULT_EPS_AZ: f64 = 5.0;
pub const DEFAULT_DEBOUNCE_TICKS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelSample {
    pub head_zdd: f64,
    pub wheel_az: f64,
    pub gravity_g: f64,
}

/// Three-way comparison outcome with a dead-band around the pivot value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Above,
    Level,
    Below,
}

impl Band {
    pub fn of(value: f64, pivot: f64, eps: f64) -> Self {
        if value > pivot + eps {
            Band::Above
        } else if value < pivot - eps {
            Band::Below
        } else {
            Band::Level
        }
    }

    fn index(self) -> usize {
        match self {
            Band::Above => 0,
            Band::Below => 1,
            Band::Level => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactStatus {
    OnGround,
    OffGround,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContactDecision {
    pub status: ContactStatus,
    pub estimate_force: bool,
}

impl ContactDecision {
    pub const fn new(status: ContactStatus, estimate_force: bool) -> Self {
        Self {
            status,
            estimate_force,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    RunEstimator,
    BypassToHeightController,
}

/// Lookup from `(head band, wheel band)` to a decision.
///
/// Rows are ordered head-major: `z̈ > g`, `z̈ < g`, `z̈ = g`, and within each
/// `a_z > 0`, `a_z < 0`, `a_z = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactTable {
    cells: [[ContactDecision; 3]; 3],
}

impl ContactTable {
    pub fn new(cells: [[ContactDecision; 3]; 3]) -> Self {
        Self { cells }
    }

    pub fn lookup(&self, head: Band, wheel: Band) -> ContactDecision {
        self.cells[head.index()][wheel.index()]
    }

    pub fn cells(&self) -> &[[ContactDecision; 3]; 3] {
        &self.cells
    }
}

impl Default for ContactTable {
    fn default() -> Self {
        use ContactStatus::{OffGround as Off, OnGround as On};
        let d = ContactDecision::new;
        Self::new([
            // z̈ > g
            [d(Off, false), d(Off, true), d(On, false)],
            // z̈ < g
            [d(On, true), d(Off, false), d(Off, false)],
            // z̈ = g
            [d(Off, false), d(Off, false), d(On, true)],
        ])
    }
}

/// Classify one sample against `table`.
pub fn classify_with(
    table: &ContactTable,
    sample: &AccelSample,
    eps_zdd: f64,
    eps_az: f64,
) -> ContactDecision {
    let head = Band::of(sample.head_zdd, sample.gravity_g, eps_zdd);
    let wheel = Band::of(sample.wheel_az, 0.0, eps_az);
    table.lookup(head, wheel)
}

/// Classify one sample against the default table.
pub fn classify(sample: &AccelSample, eps_zdd: f64, eps_az: f64) -> ContactDecision {
    classify_with(&ContactTable::default(), sample, eps_zdd, eps_az)
}

pub fn gate(decision: ContactDecision) -> Gate {
    match decision {
        ContactDecision {
            status: ContactStatus::OnGround,
            estimate_force: true,
        } => Gate::RunEstimator,
        _ => Gate::BypassToHeightController,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContactParams {
    pub eps_zdd: f64,
    pub eps_az: f64,
    pub debounce_ticks: u32,
}

impl Default for ContactParams {
    fn default() -> Self {
        Self {
            eps_zdd: DEFAULT_EPS_ZDD,
            eps_az: DEFAULT_EPS_AZ,
            debounce_ticks: DEFAULT_DEBOUNCE_TICKS,
        }
    }
}

impl ContactParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_zdd > 0.0 && self.eps_zdd.is_finite()) {
            return Err(invalid("contact.eps_zdd", "must be > 0"));
        }
        if !(self.eps_az > 0.0 && self.eps_az.is_finite()) {
            return Err(invalid("contact.eps_az", "must be > 0"));
        }
        if self.debounce_ticks == 0 {
            return Err(invalid("contact.debounce_ticks", "must be >= 1"));
        }
        Ok(())
    }
}

/// Debounced classifier owned by one control loop.
///
/// The reported decision only changes after `debounce_ticks` consecutive raw
/// classifications agree on the new cell. The first sample is accepted as is.
#[derive(Debug, Clone)]
pub struct ContactDetector {
    params: ContactParams,
    table: ContactTable,
    current: Option<ContactDecision>,
    candidate: Option<ContactDecision>,
    streak: u32,
}

impl ContactDetector {
    pub fn new(params: ContactParams) -> Result<Self> {
        Self::with_table(params, ContactTable::default())
    }

    pub fn with_table(params: ContactParams, table: ContactTable) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            table,
            current: None,
            candidate: None,
            streak: 0,
        })
    }

    pub fn update(&mut self, sample: &AccelSample) -> ContactDecision {
        let raw = classify_with(&self.table, sample, self.params.eps_zdd, self.params.eps_az);
        let current = match self.current {
            None => raw,
            Some(current) if raw == current => {
                self.candidate = None;
                self.streak = 0;
                current
            }
            Some(current) => {
                if self.candidate == Some(raw) {
                    self.streak += 1;
                } else {
                    self.candidate = Some(raw);
                    self.streak = 1;
                }
                if self.streak >= self.params.debounce_ticks {
                    self.candidate = None;
                    self.streak = 0;
                    raw
                } else {
                    current
                }
            }
        };
        self.current = Some(current);
        current
    }

    pub fn current(&self) -> Option<ContactDecision> {
        self.current
    }

    pub fn reset(&mut self) {
        self.current = None;
        self.candidate = None;
        self.streak = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ContactStatus::{OffGround as Off, OnGround as On};

    const G: f64 = 9.81;
    const EZ: f64 = 0.3;
    const EA: f64 = 0.1;

    fn at(head_zdd: f64, wheel_az: f64) -> ContactDecision {
        classify(&AccelSample { head_zdd, wheel_az, gravity_g: G }, EZ, EA)
    }

    #[test]
    fn all_nine_rows() {
        let up = G + 1.0;
        let down = G - 1.0;
        let cases = [
            (up, 1.0, Off, false),
            (up, -1.0, Off, true),
            (up, 0.0, On, false),
            (down, 1.0, On, true),
            (down, -1.0, Off, false),
            (down, 0.0, Off, false),
            (G, 1.0, Off, false),
            (G, -1.0, Off, false),
            (G, 0.0, On, true),
        ];
        for (i, (zdd, az, status, est)) in cases.into_iter().enumerate() {
            assert_eq!(at(zdd, az), ContactDecision::new(status, est), "row {}", i + 1);
        }
    }

    #[test]
    fn dead_band_reads_as_level() {
        assert_eq!(at(G + EZ / 2.0, 0.0), ContactDecision::new(On, true));
        assert_eq!(at(G - EZ / 2.0, EA / 2.0), ContactDecision::new(On, true));
    }

    #[test]
    fn gate_follows_status_and_flag() {
        assert_eq!(gate(ContactDecision::new(Off, false)), Gate::BypassToHeightController);
        assert_eq!(gate(ContactDecision::new(On, true)), Gate::RunEstimator);
        assert_eq!(gate(ContactDecision::new(On, false)), Gate::BypassToHeightController);
        // row 2 carries the estimate flag yet reports off-ground
        assert_eq!(gate(at(G + 1.0, -1.0)), Gate::BypassToHeightController);
    }

    #[test]
    fn exactly_three_cells_request_estimation() {
        let table = ContactTable::default();
        let n = table.cells().iter().flatten().filter(|d| d.estimate_force).count();
        assert_eq!(n, 3);
        let runs = table.cells().iter().flatten().filter(|d| gate(**d) == Gate::RunEstimator).count();
        assert_eq!(runs, 2);
    }

    #[test]
    fn table_is_overridable() {
        let mut cells = *ContactTable::default().cells();
        cells[0][2] = ContactDecision::new(Off, false);
        let table = ContactTable::new(cells);
        let s = AccelSample { head_zdd: G + 1.0, wheel_az: 0.0, gravity_g: G };
        assert_eq!(classify_with(&table, &s, EZ, EA).status, Off);
    }

    #[test]
    fn debounce_holds_until_streak() {
        let params = ContactParams { eps_zdd: EZ, eps_az: EA, debounce_ticks: 3 };
        let mut det = ContactDetector::new(params).unwrap();
        let rest = AccelSample { head_zdd: G, wheel_az: 0.0, gravity_g: G };
        let fall = AccelSample { head_zdd: 0.0, wheel_az: 0.0, gravity_g: G };
        assert_eq!(det.update(&rest).status, On);
        assert_eq!(det.update(&fall).status, On);
        assert_eq!(det.update(&fall).status, On);
        // a single stray sample restarts the streak
        assert_eq!(det.update(&rest).status, On);
        assert_eq!(det.update(&fall).status, On);
        assert_eq!(det.update(&fall).status, On);
        assert_eq!(det.update(&fall).status, Off);
        assert_eq!(det.update(&rest).status, Off);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ContactDetector::new(ContactParams { eps_zdd: 0.0, ..Default::default() }).is_err());
        assert!(ContactDetector::new(ContactParams { eps_az: -1.0, ..Default::default() }).is_err());
        assert!(ContactDetector::new(ContactParams { debounce_ticks: 0, ..Default::default() }).is_err());
    }
}
