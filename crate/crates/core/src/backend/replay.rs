//! Completion provider that answers from a recorded response log, keyed by
//! prompt hash, temperature, and repetition index. Running a configuration
//! against a replay backend loaded with its own prior log reproduces that
//! log's texts exactly.

use std::collections::HashMap;
use std::path::Path;

use super::{
    read_jsonl, sha256_hex, BackendError, CompletionBackend, CompletionRequest, LogError,
    RawResponse,
};

pub struct ReplayBackend {
    recorded: HashMap<(String, u64, u32), String>,
}

impl ReplayBackend {
    pub fn from_log(responses: &[RawResponse]) -> Self {
        let recorded = responses
            .iter()
            .map(|r| {
                (
                    (r.prompt_hash.clone(), r.temperature.to_bits(), r.rep),
                    r.raw_text.clone(),
                )
            })
            .collect();
        ReplayBackend { recorded }
    }

    pub fn from_file(path: &Path) -> Result<Self, LogError> {
        Ok(Self::from_log(&read_jsonl(path)?))
    }

    pub fn len(&self) -> usize {
        self.recorded.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recorded.is_empty()
    }
}

impl CompletionBackend for ReplayBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        request.validate()?;
        let hash = sha256_hex(request.prompt.as_bytes());
        let rep = request.tag.as_ref().map_or(0, |t| t.rep);
        self.recorded
            .get(&(hash.clone(), request.temperature.to_bits(), rep))
            .cloned()
            .ok_or(BackendError::ReplayMiss {
                hash,
                temperature: request.temperature,
                rep,
            })
    }
}
