//! JSON reports. The output file holds an array with one report per prime.

use std::path::Path;

use anyhow::{Context, Result};
use asdlab_core::curve::WeierstrassCurve;
use asdlab_core::engine::{CheckKind, CheckRecord, CongruenceReport, Status, Summary};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckJson {
    pub kind: CheckKind,
    pub label: String,
    pub n: i64,
    pub l: u32,
    pub required_exponent: u32,
    /// `null` when the coefficients lie beyond the truncation
    pub observed_valuation: Option<u32>,
    pub status: Status,
    pub p_divides_n: bool,
}

impl From<&CheckRecord> for CheckJson {
    fn from(r: &CheckRecord) -> Self {
        CheckJson {
            kind: r.kind,
            label: r.label.clone(),
            n: r.n,
            l: r.l,
            required_exponent: r.required_exponent,
            observed_valuation: r.observed_valuation,
            status: r.status,
            p_divides_n: r.p_divides_n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Versions {
    pub asdlab: &'static str,
    pub report_schema: u32,
}

impl Default for Versions {
    fn default() -> Self {
        Versions {
            asdlab: env!("CARGO_PKG_VERSION"),
            report_schema: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub curve: [i64; 5],
    pub p: u64,
    pub k: u32,
    pub a_p: Option<i64>,
    /// `ordinary`, `supersingular` or `bad`
    pub reduction: String,
    pub precision: Option<u32>,
    pub trunc: Option<usize>,
    pub checks: Vec<CheckJson>,
    pub summary: Summary,
    pub conventions: serde_json::Value,
    pub notes: Vec<String>,
    pub versions: Versions,
}

impl Report {
    pub fn new(curve: &WeierstrassCurve, p: u64, k: u32) -> Self {
        Report {
            curve: curve.coefficients(),
            p,
            k,
            a_p: None,
            reduction: "ordinary".into(),
            precision: None,
            trunc: None,
            checks: Vec::new(),
            summary: Summary::default(),
            conventions: serde_json::json!({}),
            notes: Vec::new(),
            versions: Versions::default(),
        }
    }

    pub fn absorb(&mut self, report: &CongruenceReport) {
        self.checks
            .extend(report.records.iter().map(CheckJson::from));
        self.notes.extend(report.notes.iter().cloned());
        self.summary = summarize(&self.checks);
    }

    /// True when nothing failed and nothing was left inconclusive.
    pub fn clean(&self) -> bool {
        self.summary.failed == 0 && self.summary.inconclusive == 0
    }

    pub fn by_kind(&self, kind: CheckKind) -> impl Iterator<Item = &CheckJson> {
        self.checks.iter().filter(move |c| c.kind == kind)
    }
}

fn summarize(checks: &[CheckJson]) -> Summary {
    let mut s = Summary {
        total: checks.len(),
        ..Summary::default()
    };
    for c in checks {
        match c.status {
            Status::Pass => s.passed += 1,
            Status::Fail => s.failed += 1,
            Status::Inconclusive => s.inconclusive += 1,
            Status::Skipped => s.skipped += 1,
        }
    }
    s
}

pub fn write_reports(path: &Path, reports: &[Report]) -> Result<()> {
    let json = serde_json::to_string_pretty(reports)?;
    std::fs::write(path, json + "\n").with_context(|| format!("writing report {}", path.display()))
}
