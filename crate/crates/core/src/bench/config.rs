//! Run configuration files.
//!
//! ```toml
//! backend = "mock"
//! script = "scripts/default.toml"   # relative to this file
//! output_dir = "out"
//!
//! [matrix]
//! configs = ["A", "B", "C"]
//! trials = [1, 2, 3, 4, 5, 6, 7]
//! repetitions = 3
//! ```
//!
//! Secrets never live in the file: the live backend reads its key from the
//! environment variable named by `live.api_key_env`.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::agent::{BackendScript, ChatBackend, HttpBackend, HttpBackendConfig, RetryPolicy, ScriptedBackend};
use crate::lang::Limits;
use crate::orchestrator::SpeakerPolicy;
use crate::world::SimParams;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Mock,
    Live,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Headless,
    Interactive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiveSettings {
    /// Literal endpoint URL; overridden by `endpoint_env` when that is set.
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default = "default_endpoint_env")]
    pub endpoint_env: String,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default = "default_model_env")]
    pub model_env: String,
    #[serde(default = "default_key_env")]
    pub api_key_env: String,
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_attempts")]
    pub retry_attempts: u32,
    #[serde(default = "default_backoff")]
    pub retry_backoff_secs: f64,
}

fn default_endpoint_env() -> String {
    "ROBOBENCH_ENDPOINT".into()
}
fn default_model_env() -> String {
    "ROBOBENCH_MODEL".into()
}
fn default_key_env() -> String {
    "ROBOBENCH_API_KEY".into()
}
fn default_timeout() -> u64 {
    120
}
fn default_attempts() -> u32 {
    3
}
fn default_backoff() -> f64 {
    1.0
}

impl Default for LiveSettings {
    fn default() -> Self {
        LiveSettings {
            endpoint: None,
            endpoint_env: default_endpoint_env(),
            model: None,
            model_env: default_model_env(),
            api_key_env: default_key_env(),
            temperature: None,
            timeout_secs: default_timeout(),
            retry_attempts: default_attempts(),
            retry_backoff_secs: default_backoff(),
        }
    }
}

impl LiveSettings {
    /// Resolves endpoint, model and key from the environment and the file.
    pub fn resolve(&self) -> Result<HttpBackendConfig, ConfigError> {
        let from_env = |name: &str| env::var(name).ok().filter(|v| !v.trim().is_empty());
        let endpoint = from_env(&self.endpoint_env).or_else(|| self.endpoint.clone()).ok_or_else(|| {
            ConfigError::Invalid(format!("live backend needs an endpoint: set {} or live.endpoint", self.endpoint_env))
        })?;
        let model = from_env(&self.model_env).or_else(|| self.model.clone()).ok_or_else(|| {
            ConfigError::Invalid(format!("live backend needs a model: set {} or live.model", self.model_env))
        })?;
        Ok(HttpBackendConfig {
            endpoint,
            model,
            api_key: from_env(&self.api_key_env),
            temperature: self.temperature,
            timeout_secs: self.timeout_secs,
        })
    }

    pub fn retry_policy(&self) -> RetryPolicy {
        RetryPolicy {
            attempts: self.retry_attempts.max(1),
            initial_backoff: Duration::from_secs_f64(self.retry_backoff_secs.max(0.0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub backend: BackendKind,
    /// Mock script; relative paths resolve against the config file.
    #[serde(default)]
    pub script: Option<PathBuf>,
    #[serde(default)]
    pub live: Option<LiveSettings>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Seeds shuffles in rating sessions and case-study export.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: usize,
    #[serde(default)]
    pub matrix: Matrix,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default)]
    pub world: SimParams,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_seed() -> u64 {
    2024
}
fn default_workers() -> usize {
    4
}
fn default_max_retries() -> u32 {
    3
}
fn default_max_rounds() -> usize {
    SpeakerPolicy::DEFAULT_MAX_ROUNDS
}

impl RunConfig {
    /// A mock-backend config with default matrix and limits.
    pub fn mock(script: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            backend: BackendKind::Mock,
            script: Some(script.into()),
            live: None,
            mode: Mode::Headless,
            output_dir: output_dir.into(),
            seed: default_seed(),
            workers: default_workers(),
            max_retries: default_max_retries(),
            max_rounds: default_max_rounds(),
            matrix: Matrix::default(),
            limits: Limits::default(),
            world: SimParams::default(),
        }
    }

    /// Parses and validates; relative paths are resolved against `base_dir`.
    pub fn from_toml(text: &str, origin: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut config: RunConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse { path: origin.to_owned(), message: e.to_string() })?;
        if let Some(script) = &config.script {
            if script.is_relative() {
                config.script = Some(base_dir.join(script));
            }
        }
        if config.output_dir.is_relative() {
            config.output_dir = base_dir.join(&config.output_dir);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text, &path.display().to_string(), path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.backend {
            BackendKind::Mock if self.script.is_none() => {
                return Err(ConfigError::Invalid("backend = \"mock\" requires `script`".into()))
            }
            BackendKind::Live if self.live.is_none() => {
                return Err(ConfigError::Invalid("backend = \"live\" requires a [live] table".into()))
            }
            _ => {}
        }
        self.matrix.validate().map_err(ConfigError::Invalid)?;
        self.limits.validate().map_err(ConfigError::Invalid)?;
        for &config in &self.matrix.configs {
            SpeakerPolicy::new(config, self.max_rounds).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        if self.workers == 0 {
            return Err(ConfigError::Invalid("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn records_path(&self) -> PathBuf {
        self.output_dir.join("records.jsonl")
    }

    /// Builds the configured backend. A mock script is checked for coverage
    /// of every opening turn in the matrix.
    pub fn build_backend(&self) -> Result<Box<dyn ChatBackend>, ConfigError> {
        match self.backend {
            BackendKind::Mock => {
                let path = self.script.as_ref().expect("validated");
                let script = BackendScript::load(path).map_err(|e| ConfigError::Invalid(e.to_string()))?;
                script
                    .check_coverage(&self.matrix.configs, &self.matrix.trials, self.matrix.repetitions)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                Ok(Box::new(ScriptedBackend::new(script)))
            }
            BackendKind::Live => {
                let live = self.live.as_ref().expect("validated");
                Ok(Box::new(HttpBackend::new(live.resolve()?, live.retry_policy())))
            }
        }
    }
}
