//! Run configuration as read from JSON. Unknown keys are rejected everywhere.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    /// Seed for jobs that do not set their own.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputSpec,
    pub jobs: Vec<JobSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: None,
            formats: default_formats(),
        }
    }
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    GnuplotDat,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::GnuplotDat => "dat",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobKind {
    Verify,
    Sweep,
    Sharpness,
    McCheck,
}

impl JobKind {
    pub fn label(self) -> &'static str {
        match self {
            JobKind::Verify => "verify",
            JobKind::Sweep => "sweep",
            JobKind::Sharpness => "sharpness",
            JobKind::McCheck => "mc-check",
        }
    }
}

/// Either a bare homogeneous dimension or a concrete group with its quasi-norm.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Abstract {
        #[serde(rename = "Q")]
        q: f64,
    },
    Euclidean {
        n: usize,
    },
    Heisenberg,
    Anisotropic {
        weights: Vec<f64>,
        exponent: u32,
    },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Multiplier on every pass tolerance.
    #[serde(default)]
    pub scale: Option<f64>,
    /// Relative target of each quadrature.
    #[serde(default)]
    pub quad_rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub kind: JobKind,
    pub theorem_id: String,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub function: Option<String>,
    /// Imaginary part for complex profiles.
    #[serde(default)]
    pub function_im: Option<String>,
    #[serde(default)]
    pub options: Map<String, Value>,
    /// Sweep axes: parameter or option name to values. Cells are the cartesian
    /// product in key order.
    #[serde(default)]
    pub grids: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                cfg.schema
            )));
        }
        Ok(cfg)
    }
}

/// Report file stem: letters, digits, `-`, `_` and `.` only.
pub fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('.')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}
