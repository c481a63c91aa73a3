//! Check rows and their JSON / CSV serialisation.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::{ReportFormat, RunConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub id: String,
    /// The formula the check exercises.
    pub paper_ref: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    /// `|lhs - rhs| < tolerance`.
    pub fn equality(id: impl Into<String>, paper_ref: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        CheckRow {
            id: id.into(),
            paper_ref: paper_ref.to_string(),
            lhs,
            rhs,
            tolerance,
            pass: (lhs - rhs).abs() < tolerance,
        }
    }

    /// `lhs ≤ rhs + tolerance`.
    pub fn upper(id: impl Into<String>, paper_ref: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        CheckRow {
            id: id.into(),
            paper_ref: paper_ref.to_string(),
            lhs,
            rhs,
            tolerance,
            pass: lhs <= rhs + tolerance,
        }
    }

    /// `lhs ≥ rhs - tolerance`.
    pub fn lower(id: impl Into<String>, paper_ref: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        CheckRow {
            id: id.into(),
            paper_ref: paper_ref.to_string(),
            lhs,
            rhs,
            tolerance,
            pass: lhs >= rhs - tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub target: String,
    pub config: RunConfig,
    pub checks: Vec<CheckRow>,
    pub pass: bool,
}

impl Report {
    pub fn new(target: &str, config: &RunConfig, checks: Vec<CheckRow>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Report {
            target: target.to_string(),
            config: config.clone(),
            checks,
            pass,
        }
    }

    /// Writes `verify-<target>.{json,csv}` into the output directory.
    pub fn write(&self, dir: &Path, format: ReportFormat) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = match format {
            ReportFormat::Json => dir.join(format!("verify-{}.json", self.target)),
            ReportFormat::Csv => dir.join(format!("verify-{}.csv", self.target)),
        };
        match format {
            ReportFormat::Json => {
                let text = serde_json::to_string_pretty(self)?;
                std::fs::write(&path, text + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            ReportFormat::Csv => {
                let mut w = csv::Writer::from_path(&path)
                    .with_context(|| format!("writing {}", path.display()))?;
                for row in &self.checks {
                    w.serialize(row)?;
                }
                w.flush().with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Ok(path)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out += &format!(
                "{} {:<40} lhs = {:<14.6e} rhs = {:<14.6e} tol = {:.1e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.lhs,
                c.rhs,
                c.tolerance
            );
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        out += &format!("{}: {} checks, {failed} failed\n", self.target, self.checks.len());
        out
    }
}
