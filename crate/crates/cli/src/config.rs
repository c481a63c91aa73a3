//! Run configuration: defaults, file loading (flat `key = value` or JSON)
//! and validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    #[default]
    Float,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

impl FromStr for Mode {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            _ => bail!("mode must be `exact` or `float`, got `{s}`"),
        }
    }
}

impl FromStr for ReportFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => bail!("report_format must be `json` or `csv`, got `{s}`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub max_level: usize,
    pub quad_tol: f64,
    pub grid_n: usize,
    pub mode: Mode,
    pub output_dir: PathBuf,
    pub report_format: ReportFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_level: 6,
            quad_tol: 1e-4,
            grid_n: 512,
            mode: Mode::Float,
            output_dir: PathBuf::from("out"),
            report_format: ReportFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=12).contains(&self.max_level) {
            bail!("max_level must lie in [1, 12], got {}", self.max_level);
        }
        if !self.grid_n.is_power_of_two() {
            bail!("grid_n must be a power of two, got {}", self.grid_n);
        }
        if !(self.quad_tol > 0.0 && self.quad_tol.is_finite()) {
            bail!("quad_tol must be positive, got {}", self.quad_tol);
        }
        Ok(())
    }

    /// Parses a config file body. JSON if it starts with `{`, otherwise
    /// `key = value` lines with `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).context("invalid JSON config")?
        } else {
            Self::parse_flat(text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn parse_flat(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected `key = value`", n + 1))?;
            let (key, value) = (key.trim(), value.trim().trim_matches('"'));
            let ctx = || format!("line {}: bad value for `{key}`", n + 1);
            match key {
                "max_level" => cfg.max_level = value.parse().with_context(ctx)?,
                "quad_tol" => cfg.quad_tol = value.parse().with_context(ctx)?,
                "grid_n" => cfg.grid_n = value.parse().with_context(ctx)?,
                "mode" => cfg.mode = value.parse().with_context(ctx)?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "report_format" => cfg.report_format = value.parse().with_context(ctx)?,
                _ => bail!("line {}: unknown key `{key}`", n + 1),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }
}
