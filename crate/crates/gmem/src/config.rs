//! TOML sweep configuration.
//!
//! ```toml
//! n = 8
//! N = 2.0
//! seed = 7
//! sweep_param = "s"
//! values = [0.0, 0.1, 0.2]
//!
//! [model]
//! family = "lossy_correlated_env"
//! eta = 0.8
//! T = 0.5
//! ```

use gmem_core::models::{Family, ModelConfig, ModelParams};
use serde::{Deserialize, Serialize};

use crate::ConfigError;

/// Largest mode count accepted from a config file.
pub const MAX_MODES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, rename = "T", skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
}

impl ModelSection {
    fn params(&self) -> ModelParams {
        let mut p = ModelParams::default();
        let given = [
            ("eta", self.eta),
            ("T", self.temperature),
            ("s", self.s),
            ("phi", self.phi),
            ("scale", self.scale),
            ("coupling", self.coupling),
        ];
        for (name, value) in given {
            if let Some(v) = value {
                p.set(name, v);
            }
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub n: usize,
    /// Mean photon number per mode.
    #[serde(rename = "N")]
    pub photons: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_param: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    pub model: ModelSection,
}

impl SweepSpec {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let spec: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        spec.validate_model()?;
        Ok(spec)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(path.display().to_string(), e.to_string()))?;
        Self::from_toml(&text)
    }

    /// Checks everything needed to build the model at its base parameters.
    pub fn validate_model(&self) -> Result<(), ConfigError> {
        self.family()?;
        if self.n == 0 || self.n > MAX_MODES {
            return Err(ConfigError::Invalid(format!("n must be in 1..={MAX_MODES}, got {}", self.n)));
        }
        if !(self.photons >= 0.0 && self.photons.is_finite()) {
            return Err(ConfigError::Invalid(format!("N must be finite and >= 0, got {}", self.photons)));
        }
        Ok(())
    }

    /// Additional checks for a sweep: a known parameter and a strictly
    /// ascending, nonempty list of values.
    pub fn validate_sweep(&self) -> Result<&str, ConfigError> {
        self.validate_model()?;
        let name = self
            .sweep_param
            .as_deref()
            .ok_or_else(|| ConfigError::Invalid("sweep_param is required for a sweep".into()))?;
        if !ModelParams::NAMES.contains(&name) {
            return Err(ConfigError::Invalid(format!(
                "unknown sweep_param `{name}`; expected one of {:?}",
                ModelParams::NAMES
            )));
        }
        if self.values.is_empty() {
            return Err(ConfigError::Invalid("values must be nonempty".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) || self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::Invalid("values must be finite and strictly ascending".into()));
        }
        Ok(name)
    }

    pub fn family(&self) -> Result<Family, ConfigError> {
        self.model.family.parse().map_err(ConfigError::Invalid)
    }

    /// Model at the configured base parameters.
    pub fn model_config(&self) -> Result<ModelConfig, ConfigError> {
        Ok(ModelConfig { family: self.family()?, n: self.n, params: self.model.params() })
    }
}
