//! Run configuration and its flat `key = value` file format.

use crate::error::{CliError, Result};
use qnm_core::oracle::{JostMode, Mutation, ScalingSettings, Suite, VerifyConfig};
use qnm_core::Model;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// Highest lattice order the normal-form engine supports (grade 12 Taylor data).
pub const MAX_ORDER: usize = qnm_core::barrier::MAX_TAYLOR_ORDER / 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!(
                "unknown format `{other}` (csv or json)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeKind {
    Strip,
    Compact,
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeKind::Strip => "strip",
            ModeKind::Compact => "compact",
        })
    }
}

impl FromStr for ModeKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "strip" => Ok(ModeKind::Strip),
            "compact" => Ok(ModeKind::Compact),
            other => Err(CliError::Config(format!(
                "unknown mode `{other}` (strip or compact)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mass: f64,
    pub charge: f64,
    pub lambda: f64,
    pub model: Model,
    pub kmax: u32,
    pub lmin: f64,
    pub lmax: f64,
    pub order: usize,
    /// k <= truncation * l; `None` keeps every overtone.
    pub truncation: Option<f64>,
    pub grid: usize,
    pub theta: f64,
    pub mode: ModeKind,
    pub xc: f64,
    pub format: Format,
    /// `None` writes to stdout.
    pub out: Option<PathBuf>,
    pub precision: usize,
    pub suite: String,
    pub mutation: Option<Mutation>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let settings = ScalingSettings::default();
        RunConfig {
            mass: 1.0,
            charge: 0.3,
            lambda: 0.02,
            model: Model::Dsrn,
            kmax: 2,
            lmin: 5.0,
            lmax: 50.0,
            order: 2,
            truncation: Some(qnm_core::lattice::DEFAULT_TRUNCATION),
            grid: settings.grid,
            theta: settings.theta,
            mode: ModeKind::Compact,
            xc: JostMode::DEFAULT_XC,
            format: Format::Csv,
            out: None,
            precision: 12,
            suite: "all".into(),
            mutation: None,
        }
    }
}

pub const KEYS: [&str; 18] = [
    "mass",
    "charge",
    "lambda",
    "model",
    "kmax",
    "lmin",
    "lmax",
    "order",
    "truncation",
    "grid",
    "theta",
    "mode",
    "xc",
    "format",
    "out",
    "precision",
    "suite",
    "mutation",
];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| CliError::Config(format!("`{key}`: cannot parse `{v}`")))
}

impl RunConfig {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "mass" => self.mass = num(key, v)?,
            "charge" => self.charge = num(key, v)?,
            "lambda" => self.lambda = num(key, v)?,
            "model" => self.model = v.parse()?,
            "kmax" => self.kmax = num(key, v)?,
            "lmin" => self.lmin = num(key, v)?,
            "lmax" => self.lmax = num(key, v)?,
            "order" => self.order = num(key, v)?,
            "truncation" => {
                self.truncation = if v == "none" {
                    None
                } else {
                    Some(num(key, v)?)
                }
            }
            "grid" => self.grid = num(key, v)?,
            "theta" => self.theta = num(key, v)?,
            "mode" => self.mode = v.parse()?,
            "xc" => self.xc = num(key, v)?,
            "format" => self.format = v.parse()?,
            "out" => {
                self.out = if v == "-" {
                    None
                } else {
                    Some(PathBuf::from(v))
                }
            }
            "precision" => self.precision = num(key, v)?,
            "suite" => {
                Suite::parse_list(v)?;
                self.suite = v.to_string();
            }
            "mutation" => self.mutation = if v == "none" { None } else { Some(v.parse()?) },
            other => return Err(CliError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a config file on top of `self`. Blank lines and `#` comments are skipped.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", i + 1))
            })?;
            self.set(k, v)
                .map_err(|e| CliError::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.merge_text(text)?;
        Ok(c)
    }

    fn value_of(&self, key: &str) -> String {
        match key {
            "mass" => self.mass.to_string(),
            "charge" => self.charge.to_string(),
            "lambda" => self.lambda.to_string(),
            "model" => self.model.to_string(),
            "kmax" => self.kmax.to_string(),
            "lmin" => self.lmin.to_string(),
            "lmax" => self.lmax.to_string(),
            "order" => self.order.to_string(),
            "truncation" => self.truncation.map_or("none".into(), |t| t.to_string()),
            "grid" => self.grid.to_string(),
            "theta" => self.theta.to_string(),
            "mode" => self.mode.to_string(),
            "xc" => self.xc.to_string(),
            "format" => self.format.to_string(),
            "out" => self
                .out
                .as_ref()
                .map_or("-".into(), |p| p.display().to_string()),
            "precision" => self.precision.to_string(),
            "suite" => self.suite.clone(),
            "mutation" => self.mutation.map_or("none".into(), |m| m.to_string()),
            _ => unreachable!("unknown key {key}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.lmin >= 1.0 && self.lmax >= self.lmin && self.lmax.is_finite()) {
            return bad(format!(
                "need 1 <= lmin <= lmax, got [{}, {}]",
                self.lmin, self.lmax
            ));
        }
        if self.order > MAX_ORDER {
            return bad(format!(
                "order {} exceeds the engine maximum {MAX_ORDER}",
                self.order
            ));
        }
        if let Some(t) = self.truncation {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("truncation must be positive, got {t}"));
            }
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return bad(format!("theta must be positive, got {}", self.theta));
        }
        if !(self.xc > 0.0 && self.xc.is_finite()) {
            return bad(format!("xc must be positive, got {}", self.xc));
        }
        if self.grid < 16 {
            return bad(format!("grid must be at least 16, got {}", self.grid));
        }
        if !(1..=17).contains(&self.precision) {
            return bad(format!(
                "precision must lie in 1..=17, got {}",
                self.precision
            ));
        }
        if self.model == Model::Dss && self.charge != 0.0 {
            return bad("the dss model requires charge = 0".into());
        }
        Ok(())
    }

    pub fn params(&self) -> Result<qnm_core::BlackHoleParams> {
        Ok(qnm_core::BlackHoleParams::new(
            self.mass,
            self.charge,
            self.lambda,
            self.model,
        )?)
    }

    pub fn jost_mode(&self) -> JostMode {
        match self.mode {
            ModeKind::Strip => JostMode::Strip,
            ModeKind::Compact => JostMode::Compact { xc: self.xc },
        }
    }

    pub fn scaling(&self) -> ScalingSettings {
        ScalingSettings {
            grid: self.grid,
            theta: self.theta,
            ..ScalingSettings::default()
        }
    }

    pub fn suites(&self) -> Result<Vec<Suite>> {
        Ok(Suite::parse_list(&self.suite)?)
    }

    /// Verification settings; the dsrn runs use this charge and the dss runs use zero.
    pub fn verify_config(&self) -> VerifyConfig {
        let base = VerifyConfig::default();
        VerifyConfig {
            mass: self.mass,
            charge: self.charge,
            lambda: self.lambda,
            settings: self.scaling(),
            mode: self.jost_mode(),
            lmin: self.lmin.floor() as u32,
            lmax: self.lmax.ceil() as u32,
            kmax: self.kmax,
            mutation: self.mutation,
            ..base
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for key in KEYS {
            writeln!(f, "{key} = {}", self.value_of(key))?;
        }
        Ok(())
    }
}
