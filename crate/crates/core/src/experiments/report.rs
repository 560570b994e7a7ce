use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calibration::WeierstrassParams;
use crate::error::{Error, Result};
use crate::fractal_dim::{LadderRow, ScalingFit};
use crate::quantum_state::StateParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremItem {
    Calibration,
    SpaceFractal,
    TimeInvariance,
    TimeFractal,
    SmoothPoints,
    VelocityFractal,
    SurfaceDim,
}

impl TheoremItem {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremItem::Calibration => "calibration",
            TheoremItem::SpaceFractal => "space_fractal",
            TheoremItem::TimeInvariance => "time_invariance",
            TheoremItem::TimeFractal => "time_fractal",
            TheoremItem::SmoothPoints => "smooth_points",
            TheoremItem::VelocityFractal => "velocity_fractal",
            TheoremItem::SurfaceDim => "surface_dim",
        }
    }
}

impl fmt::Display for TheoremItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportParams {
    State(StateParams),
    Weierstrass(WeierstrassParams),
}

/// One prediction checked against one estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub theorem_item: TheoremItem,
    pub label: String,
    pub params: ReportParams,
    pub predicted: f64,
    pub estimated: f64,
    pub tolerance: f64,
    /// Fit behind `estimated`, absent when no fit applies.
    pub fit: Option<ScalingFit>,
    /// Box-count fit over the same ladder, for comparison.
    pub box_fit: Option<ScalingFit>,
    pub ladder: Vec<LadderRow>,
    pub passed: bool,
    /// Counted towards the suite verdict; informational runs are not.
    pub gated: bool,
    pub classification: Option<String>,
    pub notes: Vec<String>,
    pub runtime_seconds: f64,
}

impl ExperimentReport {
    pub(crate) fn new(
        theorem_item: TheoremItem,
        label: impl Into<String>,
        params: ReportParams,
        predicted: f64,
        estimated: f64,
        tolerance: f64,
    ) -> Self {
        ExperimentReport {
            theorem_item,
            label: label.into(),
            params,
            predicted,
            estimated,
            tolerance,
            fit: None,
            box_fit: None,
            ladder: Vec::new(),
            passed: (predicted - estimated).abs() <= tolerance,
            gated: true,
            classification: None,
            notes: Vec::new(),
            runtime_seconds: 0.0,
        }
    }

    /// `(q, s)` columns: the state parameters, or `(b, 2 + ln a/ln b)` for a
    /// calibration function.
    pub fn q_s(&self) -> (f64, f64) {
        match self.params {
            ReportParams::State(p) => (p.q() as f64, p.s()),
            ReportParams::Weierstrass(w) => (w.b(), crate::calibration::theoretical_dimension(&w)),
        }
    }

    pub fn r_squared(&self) -> f64 {
        self.fit.as_ref().map_or(1.0, |f| f.r_squared)
    }

    pub fn csv_row(&self) -> CsvRow {
        let (q, s) = self.q_s();
        CsvRow {
            theorem_item: self.theorem_item.as_str().to_string(),
            q,
            s,
            predicted: self.predicted,
            estimated: self.estimated,
            tolerance: self.tolerance,
            r_squared: self.r_squared(),
            passed: self.passed,
            runtime_seconds: self.runtime_seconds,
        }
    }
}

/// A line of the CSV summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub theorem_item: String,
    pub q: f64,
    pub s: f64,
    pub predicted: f64,
    pub estimated: f64,
    pub tolerance: f64,
    pub r_squared: f64,
    pub passed: bool,
    pub runtime_seconds: f64,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv_rows<W: Write>(rows: &[CsvRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    if rows.is_empty() {
        w.write_record([
            "theorem_item",
            "q",
            "s",
            "predicted",
            "estimated",
            "tolerance",
            "r_squared",
            "passed",
            "runtime_seconds",
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv<W: Write>(reports: &[ExperimentReport], out: W) -> Result<()> {
    let rows: Vec<CsvRow> = reports.iter().map(ExperimentReport::csv_row).collect();
    write_csv_rows(&rows, out)
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_err))
        .collect()
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' })
        .collect()
}

/// Writes `summary.csv` and one JSON detail record per report into `dir`.
pub fn write_outputs(reports: &[ExperimentReport], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut buf = Vec::new();
    write_csv(reports, &mut buf)?;
    fs::write(dir.join("summary.csv"), buf)?;
    for (i, r) in reports.iter().enumerate() {
        let name = format!("{i:03}_{}_{}.json", r.theorem_item, slug(&r.label));
        let json = serde_json::to_string_pretty(r).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(dir.join(name), json + "\n")?;
    }
    Ok(())
}

/// Machine-readable record of an aborted run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub error: String,
    pub message: String,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        ErrorRecord {
            error: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let p = StateParams::new(2, 1.5, 19).unwrap();
        let mut r = ExperimentReport::new(
            TheoremItem::SpaceFractal,
            "t=0",
            ReportParams::State(p),
            1.5,
            1.4987654321,
            0.1,
        );
        r.runtime_seconds = 0.125;
        let reports = vec![r.clone(), ExperimentReport { passed: false, ..r }];
        let mut first = Vec::new();
        write_csv(&reports, &mut first).unwrap();
        let rows = read_csv(first.as_slice()).unwrap();
        let mut second = Vec::new();
        write_csv_rows(&rows, &mut second).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with("theorem_item,q,s,predicted,estimated,tolerance,r_squared,passed,runtime_seconds\n"));
    }

    #[test]
    fn passed_follows_tolerance() {
        let p = StateParams::new(2, 1.5, 19).unwrap();
        let r = ExperimentReport::new(TheoremItem::SpaceFractal, "", ReportParams::State(p), 1.5, 1.61, 0.1);
        assert!(!r.passed);
        let r = ExperimentReport::new(TheoremItem::SpaceFractal, "", ReportParams::State(p), 1.5, 1.59, 0.1);
        assert!(r.passed);
    }
}
