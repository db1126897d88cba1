//! Machine-readable verification reports.
//!
//! A report is a flat list of named metrics, each optionally carrying the
//! tolerance it was judged against.  The overall status is derived, never set
//! by hand: `Pass` iff every judged metric is within its tolerance.  Reports
//! serialize to JSON with stable field order, and every number that appears
//! in a report can also be written to a CSV artifact alongside it.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::geom::PointCloud;
use crate::submetry::SlopeEstimate;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Unconverged,
}

/// How a metric value is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// value <= limit
    AtMost(f64),
    /// value >= limit
    AtLeast(f64),
    /// |value - target| <= 0.5 (integer-valued checks)
    ExactInt(i64),
    /// informational; never judged
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
}

impl Metric {
    pub fn ok(&self) -> bool {
        match self.bound {
            Bound::AtMost(t) => self.value <= t,
            Bound::AtLeast(t) => self.value >= t,
            Bound::ExactInt(t) => (self.value - t as f64).abs() <= 0.5,
            Bound::None => true,
        }
    }
}

/// Outcome of one verification scenario or detector run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario_id: String,
    pub status: Status,
    /// Detector-style verdict where applicable
    /// ("consistent-with-convex" / "nonconvex-witness" / "no-probe-points").
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    pub seed: u64,
    /// Named integer budgets that shaped the run.
    pub budgets: Vec<(String, u64)>,
    pub metrics: Vec<Metric>,
    /// Effective configuration echoed for provenance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
    /// Paths of CSV artifacts written for this report.
    pub artifacts: Vec<String>,
    /// Free-form notes (degenerate inputs, skipped directions, ...).
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(scenario_id: impl Into<String>, seed: u64) -> VerificationReport {
        VerificationReport {
            scenario_id: scenario_id.into(),
            status: Status::Pass,
            verdict: None,
            seed,
            budgets: Vec::new(),
            metrics: Vec::new(),
            config: None,
            artifacts: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn budget(&mut self, name: &str, value: u64) -> &mut Self {
        self.budgets.push((name.to_string(), value));
        self
    }

    pub fn metric(&mut self, name: &str, value: f64, bound: Bound) -> &mut Self {
        self.metrics.push(Metric {
            name: name.to_string(),
            value,
            bound,
        });
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    /// Recomputes status from the metrics; call once after all metrics are in.
    /// `unconverged` forces the weaker status even if metrics pass.
    pub fn finalize(&mut self, unconverged: bool) {
        let all_ok = self.metrics.iter().all(Metric::ok);
        self.status = if !all_ok {
            Status::Fail
        } else if unconverged {
            Status::Unconverged
        } else {
            Status::Pass
        };
    }

    pub fn failing_metrics(&self) -> Vec<&Metric> {
        self.metrics.iter().filter(|m| !m.ok()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json()?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

/// Writes every metric of a report as one CSV row (`name,value,bound,limit,ok`).
pub fn write_metrics_csv(report: &VerificationReport, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "name,value,bound,limit,ok")?;
    for m in &report.metrics {
        let (kind, limit) = match m.bound {
            Bound::AtMost(t) => ("at-most", format!("{t}")),
            Bound::AtLeast(t) => ("at-least", format!("{t}")),
            Bound::ExactInt(t) => ("exact-int", format!("{t}")),
            Bound::None => ("none", String::new()),
        };
        writeln!(f, "{},{},{},{},{}", m.name, m.value, kind, limit, m.ok())?;
    }
    Ok(())
}

/// Writes a point cloud as CSV with one coordinate per column.
pub fn write_points_csv(cloud: &PointCloud, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    let header: Vec<String> = (0..cloud.dim()).map(|i| format!("x{i}")).collect();
    writeln!(f, "{}", header.join(","))?;
    for p in cloud.points() {
        let row: Vec<String> = p.coords().iter().map(|c| format!("{c}")).collect();
        writeln!(f, "{}", row.join(","))?;
    }
    Ok(())
}

/// Writes slope estimates as CSV rows `(probe, x…, radius, sup, raw, clamped)`.
pub fn write_slopes_csv(estimates: &[SlopeEstimate], path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    let dim = estimates.first().map(|e| e.base_point.dim()).unwrap_or(0);
    let coords: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    writeln!(
        f,
        "probe,{},radius,per_radius_sup,raw,clamped",
        coords.join(",")
    )?;
    for (i, e) in estimates.iter().enumerate() {
        for (r, s) in e.radii.iter().zip(&e.per_radius_sup) {
            let row: Vec<String> = e
                .base_point
                .coords()
                .iter()
                .map(|c| format!("{c}"))
                .collect();
            writeln!(
                f,
                "{},{},{},{},{},{}",
                i,
                row.join(","),
                r,
                s,
                e.raw,
                e.clamped
            )?;
        }
    }
    Ok(())
}

/// Builds `dir/<scenario_id>-seed<seed>-<suffix>.csv`.
pub fn artifact_path(dir: &Path, scenario_id: &str, seed: u64, suffix: &str) -> PathBuf {
    dir.join(format!("{scenario_id}-seed{seed}-{suffix}.csv"))
}
