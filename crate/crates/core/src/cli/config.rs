use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmetric::StateSpec;

/// Environment variable overriding the sphere cache directory.
pub const CACHE_ENV: &str = "FCSTAR_CACHE_DIR";

/// Everything that determines a report. Serialized verbatim into the report,
/// so rerunning a report's config reproduces it byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub model: Option<String>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub radius: Option<usize>,
    pub p_max: Option<usize>,
    pub max: Option<usize>,
    pub top: Option<usize>,
    pub n_cut: Option<usize>,
    pub samples: Option<usize>,
    pub big_k: Option<usize>,
    pub big_r: Option<usize>,
    pub tol: Option<f64>,
    pub eps: Option<f64>,
    pub c: Option<f64>,
    pub trials: Option<usize>,
    pub starts: Option<usize>,
    pub iters: Option<usize>,
    pub exhaustive: Option<bool>,
    pub components: Option<[String; 2]>,
    pub states: Option<Vec<StateSpec>>,
    pub seed: u64,
    pub csv: bool,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: &str, seed: u64) -> Self {
        RunConfig {
            command: command.into(),
            model: None,
            k: None,
            m: None,
            n: None,
            radius: None,
            p_max: None,
            max: None,
            top: None,
            n_cut: None,
            samples: None,
            big_k: None,
            big_r: None,
            tol: None,
            eps: None,
            c: None,
            trials: None,
            starts: None,
            iters: None,
            exhaustive: None,
            components: None,
            states: None,
            seed,
            csv: true,
            cache_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub(crate) fn need<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T> {
        v.ok_or_else(|| Error::InvalidParameter(format!("{} needs --{}", self.command, name.replace('_', "-"))))
    }
}
