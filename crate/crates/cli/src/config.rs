//! Run configuration: method, inputs, preprocessing chains and options.
//!
//! A configuration can come from CLI flags, from a TOML file (`--config`),
//! or both; flags override file values. Relative paths inside a config file
//! are resolved against the file's directory so preset bundles can ship next
//! to their data.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use diadem::ktable::InterstructureMode;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Pca,
    Bga,
    Coia,
    Pta,
    Bgcoia,
    Statico,
    Costatis,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pca" => Ok(Method::Pca),
            "bga" => Ok(Method::Bga),
            "coia" => Ok(Method::Coia),
            "pta" => Ok(Method::Pta),
            "bgcoia" => Ok(Method::Bgcoia),
            "statico" => Ok(Method::Statico),
            "costatis" => Ok(Method::Costatis),
            other => Err(format!(
                "unknown method `{other}` (expected pca|bga|coia|pta|bgcoia|statico|costatis)"
            )),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::Pca => "pca",
            Method::Bga => "bga",
            Method::Coia => "coia",
            Method::Pta => "pta",
            Method::Bgcoia => "bgcoia",
            Method::Statico => "statico",
            Method::Costatis => "costatis",
        };
        f.write_str(name)
    }
}

/// One preprocessing step of a scale chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleStep {
    /// Entry-wise `ln(1 + x)`.
    Log1p,
    /// Remove weighted column means.
    Center,
    /// Divide columns by their weighted standard deviation (no centering).
    Scale,
    /// Center and scale.
    Standardize,
    /// Center within each block.
    Within,
    /// Standardize within each block.
    Partial,
}

impl ScaleStep {
    pub fn needs_blocks(self) -> bool {
        matches!(self, ScaleStep::Within | ScaleStep::Partial)
    }

    fn name(self) -> &'static str {
        match self {
            ScaleStep::Log1p => "log1p",
            ScaleStep::Center => "center",
            ScaleStep::Scale => "scale",
            ScaleStep::Standardize => "standardize",
            ScaleStep::Within => "within",
            ScaleStep::Partial => "partial",
        }
    }
}

/// A `+`-separated chain of preprocessing steps, e.g.
/// `standardize+within+scale` or `log1p+center`. `none` is the empty chain.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScaleChain(pub Vec<ScaleStep>);

impl ScaleChain {
    pub fn needs_blocks(&self) -> bool {
        self.0.iter().any(|s| s.needs_blocks())
    }
}

impl FromStr for ScaleChain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s.eq_ignore_ascii_case("none") {
            return Ok(ScaleChain(Vec::new()));
        }
        let mut steps = Vec::new();
        for part in s.split('+') {
            let step = match part.trim().to_ascii_lowercase().as_str() {
                "log1p" => ScaleStep::Log1p,
                "center" => ScaleStep::Center,
                "scale" => ScaleStep::Scale,
                "standardize" => ScaleStep::Standardize,
                "within" => ScaleStep::Within,
                "partial" => ScaleStep::Partial,
                other => {
                    return Err(format!(
                        "unknown scaling step `{other}` (expected none|log1p|center|scale|standardize|within|partial)"
                    ))
                }
            };
            steps.push(step);
        }
        Ok(ScaleChain(steps))
    }
}

impl fmt::Display for ScaleChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("none");
        }
        let names: Vec<&str> = self.0.iter().map(|s| s.name()).collect();
        f.write_str(&names.join("+"))
    }
}

pub fn parse_interstructure(s: &str) -> Result<InterstructureMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "cov" => Ok(InterstructureMode::Covariance),
        "rv" => Ok(InterstructureMode::Correlation),
        other => Err(format!("unknown interstructure mode `{other}` (expected cov|rv)")),
    }
}

/// Fully resolved configuration of one analysis run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub method: Method,
    pub table_x: PathBuf,
    pub table_y: Option<PathBuf>,
    pub groups: Option<PathBuf>,
    pub blocks_x: Option<PathBuf>,
    pub blocks_y: Option<PathBuf>,
    pub scale_x: ScaleChain,
    pub scale_y: ScaleChain,
    pub axes: usize,
    pub n_perm: usize,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub plots: bool,
    pub interstructure: InterstructureMode,
}

impl RunConfig {
    /// Check per-method input requirements.
    pub fn validate(&self) -> Result<(), CliError> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(CliError::Config(format!(
                    "method `{}` requires {what}",
                    self.method
                )))
            }
        };
        match self.method {
            Method::Pca => {}
            Method::Bga => need(self.groups.is_some(), "--groups")?,
            Method::Coia => need(self.table_y.is_some(), "--table-y")?,
            Method::Pta => need(self.blocks_x.is_some(), "--blocks-x")?,
            Method::Bgcoia => {
                need(self.table_y.is_some(), "--table-y")?;
                need(self.groups.is_some(), "--groups")?;
            }
            Method::Statico | Method::Costatis => {
                need(self.table_y.is_some(), "--table-y")?;
                need(self.blocks_x.is_some(), "--blocks-x")?;
            }
        }
        if self.axes == 0 {
            return Err(CliError::Config("--axes must be at least 1".into()));
        }
        if self.n_perm > 0 && self.seed.is_none() {
            return Err(CliError::Config(
                "--seed is required when --nperm > 0 (reports must be reproducible)".into(),
            ));
        }
        if self.scale_x.needs_blocks() && self.blocks_x.is_none() {
            return Err(CliError::Config(
                "--scale-x uses within-block steps, so --blocks-x is required".into(),
            ));
        }
        if self.scale_y.needs_blocks() && self.blocks_y.is_none() && self.blocks_x.is_none() {
            return Err(CliError::Config(
                "--scale-y uses within-block steps, so --blocks-y (or --blocks-x) is required"
                    .into(),
            ));
        }
        Ok(())
    }

    /// Canonical `key = value` rendering; hashed into the report provenance
    /// and written next to the outputs.
    pub fn canonical(&self) -> String {
        let mut lines = vec![
            format!("method = {}", self.method),
            format!("table_x = {}", self.table_x.display()),
        ];
        if let Some(p) = &self.table_y {
            lines.push(format!("table_y = {}", p.display()));
        }
        if let Some(p) = &self.groups {
            lines.push(format!("groups = {}", p.display()));
        }
        if let Some(p) = &self.blocks_x {
            lines.push(format!("blocks_x = {}", p.display()));
        }
        if let Some(p) = &self.blocks_y {
            lines.push(format!("blocks_y = {}", p.display()));
        }
        lines.push(format!("scale_x = {}", self.scale_x));
        lines.push(format!("scale_y = {}", self.scale_y));
        lines.push(format!("axes = {}", self.axes));
        lines.push(format!("nperm = {}", self.n_perm));
        if let Some(s) = self.seed {
            lines.push(format!("seed = {s}"));
        }
        lines.push(format!(
            "interstructure = {}",
            match self.interstructure {
                InterstructureMode::Covariance => "cov",
                InterstructureMode::Correlation => "rv",
            }
        ));
        lines.join("\n") + "\n"
    }
}

/// The subset of options that may come from a TOML config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub method: Option<String>,
    pub table_x: Option<String>,
    pub table_y: Option<String>,
    pub groups: Option<String>,
    pub blocks_x: Option<String>,
    pub blocks_y: Option<String>,
    pub scale_x: Option<String>,
    pub scale_y: Option<String>,
    pub axes: Option<usize>,
    pub nperm: Option<usize>,
    pub seed: Option<u64>,
    pub interstructure: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let raw = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&raw)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Resolve a path value relative to the config file location.
    pub fn resolve(base: &Path, value: &str) -> PathBuf {
        let p = PathBuf::from(value);
        if p.is_absolute() {
            p
        } else {
            base.parent().unwrap_or(Path::new(".")).join(p)
        }
    }
}
