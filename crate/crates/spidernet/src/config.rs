//! Run configuration shared by every subcommand.

use std::fmt;
use std::ops::Range;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use spidernet_core::{
    Flavor, JacobiSequence, Method, Quadrature, SpidernetParams, WalkOperatorKind,
};

use crate::CliError;

pub const MAX_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OperatorArg {
    Adjacency,
    Laplacian,
}

impl From<OperatorArg> for WalkOperatorKind {
    fn from(op: OperatorArg) -> Self {
        match op {
            OperatorArg::Adjacency => WalkOperatorKind::Adjacency,
            OperatorArg::Laplacian => WalkOperatorKind::NegativeLaplacian,
        }
    }
}

impl From<WalkOperatorKind> for OperatorArg {
    fn from(kind: WalkOperatorKind) -> Self {
        match kind {
            WalkOperatorKind::Adjacency => OperatorArg::Adjacency,
            WalkOperatorKind::NegativeLaplacian => OperatorArg::Laplacian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FlavorArg {
    Classical,
    Quantum,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::Classical => Flavor::Classical,
            FlavorArg::Quantum => Flavor::Quantum,
        }
    }
}

impl From<Flavor> for FlavorArg {
    fn from(f: Flavor) -> Self {
        match f {
            Flavor::Classical => FlavorArg::Classical,
            Flavor::Quantum => FlavorArg::Quantum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodTag {
    Spectral,
    Oracle,
    ClosedForm,
}

impl From<Method> for MethodTag {
    fn from(m: Method) -> Self {
        match m {
            Method::Spectral => MethodTag::Spectral,
            Method::Oracle => MethodTag::Oracle,
            Method::ClosedForm => MethodTag::ClosedForm,
        }
    }
}

impl From<MethodTag> for Method {
    fn from(m: MethodTag) -> Self {
        match m {
            MethodTag::Spectral => Method::Spectral,
            MethodTag::Oracle => Method::Oracle,
            MethodTag::ClosedForm => Method::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Lin,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Half-open stratum range. Parses `K` (strata `0..K`), `A..B` and `A..=B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrataRange {
    pub start: usize,
    pub end: usize,
}

impl StrataRange {
    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }
}

impl FromStr for StrataRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad stratum bound `{x}`"))
        };
        let (start, end) = if let Some((a, b)) = s.split_once("..=") {
            (num(a)?, num(b)? + 1)
        } else if let Some((a, b)) = s.split_once("..") {
            (num(a)?, num(b)?)
        } else {
            (0, num(s)?)
        };
        if start >= end {
            return Err(format!("empty stratum range `{s}`"));
        }
        Ok(Self { start, end })
    }
}

impl fmt::Display for StrataRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// Everything needed to reproduce a run. Serialized into the `meta` block of
/// JSON outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// `None` selects the normalized `a -> infinity` semicircle limit.
    pub params: Option<[u32; 3]>,
    pub operator: OperatorArg,
    pub flavor: FlavorArg,
    pub depth: usize,
    pub tmin: f64,
    pub tmax: f64,
    pub steps: usize,
    pub spacing: Spacing,
    pub strata: StrataRange,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub closed_form: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stamp: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: None,
            operator: OperatorArg::Adjacency,
            flavor: FlavorArg::Quantum,
            depth: 6,
            tmin: 0.0,
            tmax: 10.0,
            steps: 201,
            spacing: Spacing::Lin,
            strata: StrataRange { start: 0, end: 8 },
            tol: 1e-10,
            format: Format::Csv,
            out: None,
            closed_form: false,
            stamp: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: &str| Err(CliError::Usage(m.to_string()));
        if self.steps < 2 {
            return usage("--steps must be at least 2");
        }
        if !(self.tol > 0.0 && self.tol <= MAX_TOL) {
            return usage("--tol must lie in (0, 1e-4]");
        }
        if !(self.tmin.is_finite() && self.tmax.is_finite() && self.tmin < self.tmax) {
            return usage("time grid needs finite --tmin < --tmax");
        }
        if self.spacing == Spacing::Log && self.tmin <= 0.0 {
            return usage("log spacing needs --tmin > 0");
        }
        if let Some([a, b, c]) = self.params {
            SpidernetParams::new(a, b, c)?;
        }
        Ok(())
    }

    pub fn spidernet(&self) -> Result<Option<SpidernetParams>, CliError> {
        match self.params {
            Some([a, b, c]) => Ok(Some(SpidernetParams::new(a, b, c)?)),
            None => Ok(None),
        }
    }

    /// Like [`spidernet`](Self::spidernet) but rejects the limit family.
    pub fn require_spidernet(&self, what: &str) -> Result<SpidernetParams, CliError> {
        self.spidernet()?
            .ok_or_else(|| CliError::Usage(format!("{what} needs --a --b --c")))
    }

    pub fn kind(&self) -> WalkOperatorKind {
        self.operator.into()
    }

    pub fn walk_flavor(&self) -> Flavor {
        self.flavor.into()
    }

    pub fn jacobi(&self) -> Result<JacobiSequence, CliError> {
        Ok(match self.spidernet()? {
            Some(p) => spidernet_core::jacobi_for_spidernet(&p, self.kind()),
            None => JacobiSequence::semicircle(),
        })
    }

    pub fn quadrature(&self) -> Quadrature {
        Quadrature::with_tol(self.tol)
    }

    /// The time grid; the last point is exactly `tmax`.
    pub fn times(&self) -> Vec<f64> {
        let n = self.steps;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    return self.tmax;
                }
                let s = i as f64 / last;
                match self.spacing {
                    Spacing::Lin => self.tmin + (self.tmax - self.tmin) * s,
                    Spacing::Log => (self.tmin.ln() + (self.tmax.ln() - self.tmin.ln()) * s).exp(),
                }
            })
            .collect()
    }
}

/// Turns `key=value` lines into command-line flags. Blank lines and lines
/// starting with `#` are skipped; boolean keys take `true` or `false`.
pub fn config_file_args(text: &str) -> Result<Vec<String>, CliError> {
    let mut args = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", n + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: bad key", n + 1)));
        }
        let flag = format!("--{key}");
        if BOOLEAN_KEYS.contains(&key.as_str()) {
            match value {
                "true" => args.push(flag),
                "false" => {}
                _ => {
                    return Err(CliError::Usage(format!(
                        "config line {}: {key} takes true or false",
                        n + 1
                    )))
                }
            }
        } else {
            args.push(flag);
            args.push(value.to_string());
        }
    }
    Ok(args)
}

const BOOLEAN_KEYS: &[&str] = &["closed-form", "limit", "clip-light-cone", "equipartition"];
