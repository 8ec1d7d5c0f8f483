//! Completion providers and the sampling protocol.
//!
//! A backend turns one [`CompletionRequest`] into completion text. Three
//! implementations exist: an HTTP client for OpenAI-style completion
//! endpoints, a replay provider that answers from a recorded response log,
//! and a scripted provider that samples from a configurable latent profile so
//! the whole pipeline can run offline. The runner (`run_stateless`,
//! `run_memory`) drives a backend through the temperature sweep and produces
//! a canonically ordered raw-response log.

mod http;
mod log;
mod replay;
mod runner;
mod scripted;

pub use self::log::{
    read_jsonl, read_manifest, sha256_hex, write_jsonl, write_manifest, LogError, RunManifest,
};
pub use http::HttpBackend;
pub use replay::ReplayBackend;
pub use runner::{run_memory, run_stateless, RateLimiter};
pub use scripted::{ScriptedBackend, ScriptedDemographics, ScriptedProfile};

use std::collections::BTreeMap;
use std::path::PathBuf;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prompt::PromptMode;

/// One completion call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub prompt: String,
    /// Sampling temperature in [0, 1].
    pub temperature: f64,
    pub max_tokens: u32,
    pub model: String,
    /// Provenance for offline backends (scripted sampling keys and replay
    /// disambiguation). Never sent over the wire.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<RequestTag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestTag {
    pub instrument_id: String,
    pub item_id: String,
    /// Repetition index in stateless mode, chain index in memory mode.
    pub rep: u32,
}

impl CompletionRequest {
    pub fn validate(&self) -> Result<(), BackendError> {
        if !(0.0..=1.0).contains(&self.temperature) {
            return Err(BackendError::InvalidRequest(format!(
                "temperature {} outside [0, 1]",
                self.temperature
            )));
        }
        if self.max_tokens < 1 {
            return Err(BackendError::InvalidRequest(
                "max_tokens must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("prompt estimate {estimate} tokens exceeds context guard {limit} (limit x 0.9); request not sent")]
    ContextLimit { estimate: u32, limit: u32 },
    #[error("replay miss: no recorded response for prompt hash {hash} at temperature {temperature} rep {rep}")]
    ReplayMiss {
        hash: String,
        temperature: f64,
        rep: u32,
    },
    #[error("retries exhausted after {attempts} attempts; last error: {last}")]
    Exhausted { attempts: u32, last: String },
    #[error("scripted backend cannot resolve the item for this request: {0}")]
    UnknownItem(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("API key missing: set the {0} environment variable")]
    MissingApiKey(String),
}

impl BackendError {
    /// Transient failures worth retrying with backoff.
    pub fn retryable(&self) -> bool {
        match self {
            BackendError::Transport(_) => true,
            BackendError::Http { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

/// A completion provider. Implementations must be safe to call from
/// concurrent tasks.
pub trait CompletionBackend: Send + Sync {
    /// Returns the provider's first completion text, untrimmed.
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Scripted,
    Http,
    Replay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
}

impl Default for RetryPolicy {
    // Exponential backoff with full jitter, starting at one second.
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay_ms: 1000,
            max_delay_ms: 30_000,
        }
    }
}

fn default_model() -> String {
    "default".into()
}

fn default_parallelism() -> usize {
    4
}

fn default_rate_limit() -> u32 {
    60
}

/// Provider selection and transport settings; part of the run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendSettings {
    pub kind: BackendKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default = "default_rate_limit")]
    pub rate_limit_per_min: u32,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scripted: Option<ScriptedProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay_log: Option<PathBuf>,
}

impl BackendSettings {
    pub fn scripted(profile: ScriptedProfile) -> Self {
        BackendSettings {
            kind: BackendKind::Scripted,
            endpoint: None,
            model: default_model(),
            parallelism: default_parallelism(),
            rate_limit_per_min: 600_000,
            retry: RetryPolicy::default(),
            scripted: Some(profile),
            replay_log: None,
        }
    }
}

fn default_samples_at_zero() -> u32 {
    1
}

fn default_context_limit() -> u32 {
    4000
}

fn default_max_tokens_likert() -> u32 {
    16
}

fn default_max_tokens_free_text() -> u32 {
    32
}

/// Full description of one sampling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub instrument_id: String,
    pub mode: PromptMode,
    /// Ascending, unique, each in [0, 1].
    pub temperatures: Vec<f64>,
    pub samples_per_cell: u32,
    #[serde(default = "default_samples_at_zero")]
    pub samples_at_zero: u32,
    pub backend: BackendSettings,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_context_limit")]
    pub context_limit: u32,
    #[serde(default = "default_max_tokens_likert")]
    pub max_tokens_likert: u32,
    #[serde(default = "default_max_tokens_free_text")]
    pub max_tokens_free_text: u32,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), BackendError> {
        if self.temperatures.is_empty() {
            return Err(BackendError::InvalidRequest(
                "no temperatures configured".into(),
            ));
        }
        for window in self.temperatures.windows(2) {
            if window[1] <= window[0] {
                return Err(BackendError::InvalidRequest(
                    "temperatures must be strictly ascending".into(),
                ));
            }
        }
        for t in &self.temperatures {
            if !(0.0..=1.0).contains(t) {
                return Err(BackendError::InvalidRequest(format!(
                    "temperature {t} outside [0, 1]"
                )));
            }
        }
        if self.samples_per_cell < 1 || self.samples_at_zero < 1 {
            return Err(BackendError::InvalidRequest(
                "samples_per_cell and samples_at_zero must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Samples requested at temperature `t`: one at 0.0 (deterministic
    /// output), `samples_per_cell` elsewhere.
    pub fn samples_at(&self, t: f64) -> u32 {
        if t == 0.0 {
            self.samples_at_zero
        } else {
            self.samples_per_cell
        }
    }
}

/// One completion with full provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawResponse {
    pub instrument_id: String,
    pub item_id: String,
    pub temperature: f64,
    /// Repetition index in stateless mode, chain index in memory mode.
    pub rep: u32,
    /// SHA-256 (hex) of the exact prompt bytes.
    pub prompt_hash: String,
    /// Completion text exactly as returned, untrimmed.
    pub raw_text: String,
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub backend_meta: BTreeMap<String, String>,
}

impl RawResponse {
    /// Records of chains that were aborted mid-run carry this marker and are
    /// excluded from scoring.
    pub fn is_partial(&self) -> bool {
        self.backend_meta.get("partial").map(String::as_str) == Some("true")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub item_id: String,
    pub temperature: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFailure {
    pub temperature: f64,
    pub chain: u32,
    pub failed_at_ordinal: u32,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub requested: usize,
    pub completed: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failed_cells: Vec<CellFailure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub partial_chains: Vec<ChainFailure>,
}

impl RunSummary {
    pub fn fully_successful(&self) -> bool {
        self.failed_cells.is_empty() && self.partial_chains.is_empty()
    }
}

/// Canonically ordered response log plus the failure summary.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub responses: Vec<RawResponse>,
    pub summary: RunSummary,
}
