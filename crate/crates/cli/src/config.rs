//! Run configuration: built-in defaults, an optional TOML config file, and
//! command-line flags, merged with the precedence flags > file > defaults.

use std::fmt;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Deserialize;

/// A flag/config invariant violation; `main` maps it to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

/// Flags shared by every subcommand. All optional: unset flags fall back to
/// the config file, then to the defaults.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Smallest signal-to-noise ratio of the curve grid
    #[arg(long, value_name = "R")]
    r_min: Option<f64>,
    /// Largest signal-to-noise ratio of the curve grid
    #[arg(long, value_name = "R")]
    r_max: Option<f64>,
    /// Number of grid points
    #[arg(long, value_name = "N")]
    points: Option<usize>,
    /// Log-spaced grid (true) or linear (false)
    #[arg(long, value_name = "BOOL")]
    log: Option<bool>,
    /// Signal energy bound E (oscillator units, ħ = 1)
    #[arg(long = "E", value_name = "E")]
    energy: Option<f64>,
    /// Thermal occupation n̄ of the isotropic additive noise
    #[arg(long = "N", value_name = "N")]
    thermal: Option<f64>,
    /// Position-quadrature noise variance σ²
    #[arg(long, value_name = "VAR")]
    sigma2: Option<f64>,
    /// Seed for the randomized suites
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Residual tolerance for the structural checks
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,
    /// Output file (figures default to $GAUSSCQ_OUT_DIR, reports to stdout)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format (figures: csv|json, reports: text|json)
    #[arg(long, value_enum, value_name = "FMT")]
    format: Option<OutputFormat>,
    /// TOML file supplying defaults for any of the flags above
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

/// Config-file counterpart of [`CommonArgs`]; keys match the flag names,
/// with the single-letter physics parameters kept upper-case.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    r_min: Option<f64>,
    r_max: Option<f64>,
    points: Option<usize>,
    log: Option<bool>,
    #[serde(rename = "E")]
    energy: Option<f64>,
    #[serde(rename = "N")]
    thermal: Option<f64>,
    sigma2: Option<f64>,
    seed: Option<u64>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
}

/// Fully resolved configuration a command runs against.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub log_spaced: bool,
    pub energy: f64,
    pub thermal: f64,
    pub sigma2: f64,
    pub seed: u64,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config file {}", path.display()))?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| usage(format!("config file {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let cfg = RunConfig {
            r_min: self.r_min.or(file.r_min).unwrap_or(1e-2),
            r_max: self.r_max.or(file.r_max).unwrap_or(1e2),
            points: self.points.or(file.points).unwrap_or(200),
            log_spaced: self.log.or(file.log).unwrap_or(true),
            energy: self.energy.or(file.energy).unwrap_or(1.0),
            thermal: self.thermal.or(file.thermal).unwrap_or(0.0),
            sigma2: self.sigma2.or(file.sigma2).unwrap_or(1.0),
            seed: self.seed.or(file.seed).unwrap_or(7),
            tol: self.tol.or(file.tol).unwrap_or(1e-9),
            out: self.out.clone().or(file.out),
            format: self.format.or(file.format),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if !(self.r_min.is_finite() && self.r_min > 0.0) {
            return Err(usage(format!(
                "--r-min must be positive, got {}",
                self.r_min
            )));
        }
        if !(self.r_max.is_finite() && self.r_max > self.r_min) {
            return Err(usage(format!(
                "--r-max must exceed --r-min ({}), got {}",
                self.r_min, self.r_max
            )));
        }
        if self.points < 2 {
            return Err(usage(format!(
                "--points must be at least 2, got {}",
                self.points
            )));
        }
        if !(self.energy.is_finite() && self.energy > 0.0) {
            return Err(usage(format!("--E must be positive, got {}", self.energy)));
        }
        if !(self.thermal.is_finite() && self.thermal >= 0.0) {
            return Err(usage(format!(
                "--N must be nonnegative, got {}",
                self.thermal
            )));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(usage(format!(
                "--sigma2 must be positive, got {}",
                self.sigma2
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(usage(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    /// The r grid: `points` values spanning [r_min, r_max], log- or linearly
    /// spaced. Pure arithmetic on the parameters, so identical configs give
    /// identical grids.
    pub fn r_grid(&self) -> Vec<f64> {
        let n = self.points;
        let step = |i: usize| i as f64 / (n - 1) as f64;
        (0..n)
            .map(|i| {
                if self.log_spaced {
                    (self.r_min.ln() + step(i) * (self.r_max.ln() - self.r_min.ln())).exp()
                } else {
                    self.r_min + step(i) * (self.r_max - self.r_min)
                }
            })
            .collect()
    }

    /// Where a file-writing command puts its output: the explicit `--out`
    /// path if given, else `default_name` inside `$GAUSSCQ_OUT_DIR` (falling
    /// back to the working directory).
    pub fn out_path(&self, default_name: &str) -> PathBuf {
        match &self.out {
            Some(path) => path.clone(),
            None => std::env::var_os("GAUSSCQ_OUT_DIR")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."))
                .join(default_name),
        }
    }
}
