//! Check records and the JSON report.
//!
//! Every float is written as `{:.16e}` (17 significant digits) through
//! [`RawValue`], so reports diff cleanly and round-trip exactly. Non-finite
//! values become `null`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use qnk_core::modcore::Sl2z;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::{MatrixSource, SuiteConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Residual,
    Angle,
    Rank,
}

/// Outcome of one check. For `Rank` records `tol` holds the expected value and
/// the check passes on equality; otherwise it passes when `value < tol`, and a
/// zero tolerance demands an exact zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub check_id: &'static str,
    pub n: Option<i64>,
    pub k: Option<i64>,
    pub eta: Option<Complex64>,
    pub tau: Option<Complex64>,
    pub matrix: Option<Sl2z>,
    pub metric: Metric,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    pub error: Option<String>,
    pub wall_time: f64,
}

impl Record {
    pub fn judge(metric: Metric, value: f64, tol: f64) -> bool {
        match metric {
            Metric::Rank => value == tol,
            _ => value < tol || (tol == 0.0 && value == 0.0),
        }
    }
}

pub fn num(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() { format!("{x:.16e}") } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

fn opt_num(x: Option<f64>) -> Box<RawValue> {
    x.map_or_else(|| num(f64::NAN), num)
}

#[derive(Serialize)]
struct RecordOut<'a> {
    check_id: &'a str,
    n: Option<i64>,
    k: Option<i64>,
    eta_re: Box<RawValue>,
    eta_im: Box<RawValue>,
    tau_re: Box<RawValue>,
    tau_im: Box<RawValue>,
    matrix: Option<[i128; 4]>,
    metric: Metric,
    value: Box<RawValue>,
    tol: Box<RawValue>,
    pass: bool,
    error: Option<&'a str>,
    wall_time: Box<RawValue>,
}

impl<'a> From<&'a Record> for RecordOut<'a> {
    fn from(r: &'a Record) -> Self {
        RecordOut {
            check_id: r.check_id,
            n: r.n,
            k: r.k,
            eta_re: opt_num(r.eta.map(|z| z.re)),
            eta_im: opt_num(r.eta.map(|z| z.im)),
            tau_re: opt_num(r.tau.map(|z| z.re)),
            tau_im: opt_num(r.tau.map(|z| z.im)),
            matrix: r.matrix.map(|m| m.entries()),
            metric: r.metric,
            value: num(r.value),
            tol: num(r.tol),
            pass: r.pass,
            error: r.error.as_deref(),
            wall_time: num(r.wall_time),
        }
    }
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    suite: String,
    nk: &'a [(i64, i64)],
    tau: Vec<[Box<RawValue>; 2]>,
    eta: Vec<[Box<RawValue>; 2]>,
    matrices: &'a MatrixSource,
    tolerances: BTreeMap<&'static str, Box<RawValue>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Serialize)]
struct ReportOut<'a> {
    version: &'static str,
    seed: u64,
    config: ConfigEcho<'a>,
    summary: Summary,
    wall_time: Box<RawValue>,
    records: Vec<RecordOut<'a>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub records: Vec<Record>,
    pub wall_time: f64,
}

impl Report {
    pub fn summary(&self) -> Summary {
        let passed = self.records.iter().filter(|r| r.pass).count();
        Summary { total: self.records.len(), passed, failed: self.records.len() - passed }
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn to_json(&self, cfg: &SuiteConfig) -> String {
        let pair = |z: &Complex64| [num(z.re), num(z.im)];
        let out = ReportOut {
            version: env!("CARGO_PKG_VERSION"),
            seed: cfg.seed,
            config: ConfigEcho {
                suite: cfg.suite.to_string(),
                nk: &cfg.nk,
                tau: cfg.tau.iter().map(pair).collect(),
                eta: cfg.eta.iter().map(pair).collect(),
                matrices: &cfg.matrices,
                tolerances: cfg.tolerances.iter().map(|(k, v)| (*k, num(*v))).collect(),
            },
            summary: self.summary(),
            wall_time: num(self.wall_time),
            records: self.records.iter().map(RecordOut::from).collect(),
        };
        let mut text = serde_json::to_string_pretty(&out).expect("report serializes");
        text.push('\n');
        text
    }
}
