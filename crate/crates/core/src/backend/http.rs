//! Blocking HTTP client for OpenAI-style text-completion endpoints.
//!
//! The request body carries model, prompt, temperature, and max_tokens; the
//! first choice's text is returned untrimmed. The API key is read from the
//! `SURVEYOR_API_KEY` environment variable (or passed explicitly) and sent as
//! a bearer token.

use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{BackendError, CompletionBackend, CompletionRequest};

pub const API_KEY_ENV: &str = "SURVEYOR_API_KEY";

pub struct HttpBackend {
    endpoint: String,
    api_key: String,
    client: reqwest::blocking::Client,
}

#[derive(Deserialize)]
struct CompletionResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    text: String,
}

impl HttpBackend {
    pub fn new(endpoint: &str, api_key: Option<String>) -> Result<Self, BackendError> {
        let api_key = match api_key {
            Some(key) => key,
            None => std::env::var(API_KEY_ENV)
                .map_err(|_| BackendError::MissingApiKey(API_KEY_ENV.into()))?,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        Ok(HttpBackend {
            endpoint: endpoint.trim_end_matches('/').to_string(),
            api_key,
            client,
        })
    }
}

impl CompletionBackend for HttpBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        request.validate()?;
        let body = json!({
            "model": request.model,
            "prompt": request.prompt,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        });
        let response = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = response.status();
        let text = response
            .text()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(BackendError::Http {
                status: status.as_u16(),
                body: text.chars().take(500).collect(),
            });
        }
        let parsed: CompletionResponse = serde_json::from_str(&text)
            .map_err(|e| BackendError::Transport(format!("malformed completion body: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.text)
            .ok_or_else(|| BackendError::Transport("completion body has no choices".into()))
    }
}
