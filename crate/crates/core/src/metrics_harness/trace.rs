//! Per-tick trace records and their CSV form.

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const COLUMNS: [&str; 10] = [
    "t", "z_head", "vz_head", "Fz_est", "Fz_true", "L_d", "L_d_prime", "L_est", "tau_knee", "contact",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    pub z_head: f64,
    pub vz_head: f64,
    pub fz_est: f64,
    pub fz_true: f64,
    pub l_d: f64,
    pub l_d_prime: f64,
    pub l_est: f64,
    pub tau_knee: f64,
    /// Detector reports on-ground.
    pub contact: bool,
}

impl TraceRecord {
    fn floats(&self) -> [f64; 9] {
        [
            self.t,
            self.z_head,
            self.vz_head,
            self.fz_est,
            self.fz_true,
            self.l_d,
            self.l_d_prime,
            self.l_est,
            self.tau_knee,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    pub records: Vec<TraceRecord>,
}

impl SimTrace {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            records: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, r: TraceRecord) {
        self.records.push(r);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.records.iter().all(|r| r.floats().iter().all(|v| v.is_finite()))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        self.write_csv_strided(w, 1)
    }

    /// Every `stride`-th record, for plotting.
    pub fn write_csv_strided<W: Write>(&self, w: W, stride: usize) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(COLUMNS)?;
        for r in self.records.iter().step_by(stride.max(1)) {
            let mut row: Vec<String> = r.floats().iter().map(|&v| format_g9(v)).collect();
            row.push(if r.contact { "1" } else { "0" }.to_string());
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
        if header != COLUMNS {
            return Err(Error::Config(format!("unexpected trace header {header:?}")));
        }
        let mut trace = SimTrace::default();
        for row in rd.records() {
            let row = row?;
            let f = |i: usize| -> Result<f64> {
                row[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("column {}: {e}", COLUMNS[i])))
            };
            trace.push(TraceRecord {
                t: f(0)?,
                z_head: f(1)?,
                vz_head: f(2)?,
                fz_est: f(3)?,
                fz_true: f(4)?,
                l_d: f(5)?,
                l_d_prime: f(6)?,
                l_est: f(7)?,
                tau_knee: f(8)?,
                contact: &row[9] == "1",
            });
        }
        Ok(trace)
    }
}

/// C-style `%.9g`: nine significant digits, trailing zeros dropped,
/// exponent form below `1e-4` or from `1e9` up.
pub fn format_g9(v: f64) -> String {
    const P: i32 = 9;
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
