//! Drives a completion backend through the sampling protocol.
//!
//! Stateless cells (item x temperature) and memory-mode chains execute
//! concurrently up to the configured parallelism; a chain is internally
//! strictly sequential. Workers append keyed results and a final canonical
//! sort by (item ordinal, temperature, rep) makes the output order a pure
//! function of (instrument, config), independent of scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use chrono::Utc;
use rand::Rng;

use super::{
    sha256_hex, BackendError, CellFailure, ChainFailure, CompletionBackend, CompletionRequest,
    RawResponse, RequestTag, RetryPolicy, RunConfig, RunOutput, RunSummary,
};
use crate::instrument::{Instrument, InstrumentKind, Item};
use crate::prompt::{render_stateless, render_with_memory, PromptExchange, PromptMode};

/// Token bucket over requests per minute, sized to a one-second burst.
pub struct RateLimiter {
    state: Mutex<BucketState>,
    per_sec: f64,
    capacity: f64,
}

struct BucketState {
    tokens: f64,
    last: Instant,
}

impl RateLimiter {
    pub fn new(per_min: u32) -> Self {
        let per_sec = f64::from(per_min.max(1)) / 60.0;
        let capacity = (per_sec).max(1.0);
        RateLimiter {
            state: Mutex::new(BucketState {
                tokens: capacity,
                last: Instant::now(),
            }),
            per_sec,
            capacity,
        }
    }

    pub fn acquire(&self) {
        loop {
            let wait = {
                let mut s = self.state.lock().unwrap();
                let now = Instant::now();
                s.tokens = (s.tokens + now.duration_since(s.last).as_secs_f64() * self.per_sec)
                    .min(self.capacity);
                s.last = now;
                if s.tokens >= 1.0 {
                    s.tokens -= 1.0;
                    return;
                }
                (1.0 - s.tokens) / self.per_sec
            };
            std::thread::sleep(Duration::from_secs_f64(wait.min(0.25)));
        }
    }
}

fn complete_with_retry(
    backend: &dyn CompletionBackend,
    request: &CompletionRequest,
    policy: &RetryPolicy,
    limiter: &RateLimiter,
) -> Result<String, BackendError> {
    let attempts = policy.max_attempts.max(1);
    let mut last: Option<BackendError> = None;
    for attempt in 0..attempts {
        limiter.acquire();
        match backend.complete(request) {
            Ok(text) => return Ok(text),
            Err(e) if e.retryable() => {
                if attempt + 1 < attempts {
                    // Exponential backoff with full jitter.
                    let ceiling = policy
                        .base_delay_ms
                        .saturating_mul(1u64 << attempt.min(20))
                        .min(policy.max_delay_ms);
                    let jitter = rand::thread_rng().gen_range(0..=ceiling);
                    std::thread::sleep(Duration::from_millis(jitter));
                }
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    let last = last.expect("loop ran at least once");
    Err(BackendError::Exhausted {
        attempts,
        last: last.to_string(),
    })
}

fn guard_context(config: &RunConfig, estimate: u32) -> Result<(), BackendError> {
    let limit = (f64::from(config.context_limit) * 0.9).floor() as u32;
    if estimate > limit {
        Err(BackendError::ContextLimit { estimate, limit })
    } else {
        Ok(())
    }
}

fn max_tokens_for(config: &RunConfig, instrument: &Instrument) -> u32 {
    match instrument.kind {
        InstrumentKind::Likert => config.max_tokens_likert,
        InstrumentKind::FreeText => config.max_tokens_free_text,
    }
}

fn check_preconditions(
    config: &RunConfig,
    instrument: &Instrument,
    expected_mode: PromptMode,
) -> Result<(), BackendError> {
    config.validate()?;
    if config.mode != expected_mode {
        return Err(BackendError::InvalidRequest(format!(
            "run config mode is {:?}, expected {expected_mode:?}",
            config.mode
        )));
    }
    if config.instrument_id != instrument.id {
        return Err(BackendError::InvalidRequest(format!(
            "config targets instrument `{}`, got `{}`",
            config.instrument_id, instrument.id
        )));
    }
    Ok(())
}

fn strip_newlines(text: &str) -> String {
    text.replace(['\n', '\r'], "")
}

type Keyed = (u32, usize, u32, RawResponse); // (ordinal, temp index, rep, record)

fn finish(mut keyed: Vec<Keyed>, mut summary: RunSummary) -> RunOutput {
    keyed.sort_by_key(|k| (k.0, k.1, k.2));
    summary.completed = keyed.len();
    summary
        .failed_cells
        .sort_by_key(|f| (f.item_id.clone(), f.temperature.to_bits()));
    summary
        .partial_chains
        .sort_by_key(|c| (c.temperature.to_bits(), c.chain));
    RunOutput {
        responses: keyed.into_iter().map(|(_, _, _, r)| r).collect(),
        summary,
    }
}

/// Administers every item independently at every temperature.
///
/// One unrecoverable backend error aborts its (item, temperature) cell, not
/// the run; failed cells contribute no records and are listed in the summary.
pub fn run_stateless(
    config: &RunConfig,
    instrument: &Instrument,
    backend: &dyn CompletionBackend,
) -> Result<RunOutput, BackendError> {
    check_preconditions(config, instrument, PromptMode::Stateless)?;
    let items = instrument.items_by_ordinal();
    let max_tokens = max_tokens_for(config, instrument);
    let limiter = RateLimiter::new(config.backend.rate_limit_per_min);

    let cells: Vec<(usize, usize)> = (0..items.len())
        .flat_map(|i| (0..config.temperatures.len()).map(move |t| (i, t)))
        .collect();
    let requested: usize = config
        .temperatures
        .iter()
        .map(|t| config.samples_at(*t) as usize * items.len())
        .sum();

    let next = AtomicUsize::new(0);
    let keyed: Mutex<Vec<Keyed>> = Mutex::new(Vec::with_capacity(requested));
    let failures: Mutex<Vec<CellFailure>> = Mutex::new(Vec::new());

    let run_cell = |item: &Item, temp_idx: usize| -> Result<Vec<Keyed>, CellFailure> {
        let t = config.temperatures[temp_idx];
        let prompt = render_stateless(instrument, item);
        let prompt_hash = sha256_hex(prompt.text.as_bytes());
        let n = config.samples_at(t);
        let mut out = Vec::with_capacity(n as usize);
        for rep in 0..n {
            let attempt = (|| -> Result<String, BackendError> {
                guard_context(config, prompt.token_estimate)?;
                let request = CompletionRequest {
                    prompt: prompt.text.clone(),
                    temperature: t,
                    max_tokens,
                    model: config.backend.model.clone(),
                    tag: Some(RequestTag {
                        instrument_id: instrument.id.clone(),
                        item_id: item.id.clone(),
                        rep,
                    }),
                };
                complete_with_retry(backend, &request, &config.backend.retry, &limiter)
            })();
            match attempt {
                Ok(raw_text) => out.push((
                    item.ordinal,
                    temp_idx,
                    rep,
                    RawResponse {
                        instrument_id: instrument.id.clone(),
                        item_id: item.id.clone(),
                        temperature: t,
                        rep,
                        prompt_hash: prompt_hash.clone(),
                        raw_text,
                        timestamp: Utc::now(),
                        backend_meta: Default::default(),
                    },
                )),
                Err(e) => {
                    return Err(CellFailure {
                        item_id: item.id.clone(),
                        temperature: t,
                        error: e.to_string(),
                    })
                }
            }
        }
        Ok(out)
    };

    let workers = config.backend.parallelism.max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                if idx >= cells.len() {
                    break;
                }
                let (item_idx, temp_idx) = cells[idx];
                match run_cell(items[item_idx], temp_idx) {
                    Ok(records) => keyed.lock().unwrap().extend(records),
                    Err(failure) => failures.lock().unwrap().push(failure),
                }
            });
        }
    });

    let summary = RunSummary {
        requested,
        completed: 0,
        failed_cells: failures.into_inner().unwrap(),
        partial_chains: Vec::new(),
    };
    Ok(finish(keyed.into_inner().unwrap(), summary))
}

/// Administers items in ordinal order within independent chains, each prompt
/// carrying the chain's own prior exchanges.
///
/// A failed completion aborts only its chain; the chain's earlier records are
/// kept but flagged partial (scoring excludes them) and the summary lists the
/// failure.
pub fn run_memory(
    config: &RunConfig,
    instrument: &Instrument,
    backend: &dyn CompletionBackend,
) -> Result<RunOutput, BackendError> {
    check_preconditions(config, instrument, PromptMode::Memory)?;
    let items = instrument.items_by_ordinal();
    let max_tokens = max_tokens_for(config, instrument);
    let limiter = RateLimiter::new(config.backend.rate_limit_per_min);

    let chains: Vec<(usize, u32)> = config
        .temperatures
        .iter()
        .enumerate()
        .flat_map(|(temp_idx, t)| (0..config.samples_at(*t)).map(move |c| (temp_idx, c)))
        .collect();
    let requested = chains.len() * items.len();

    let next = AtomicUsize::new(0);
    let keyed: Mutex<Vec<Keyed>> = Mutex::new(Vec::with_capacity(requested));
    let failures: Mutex<Vec<ChainFailure>> = Mutex::new(Vec::new());

    let run_chain = |temp_idx: usize, chain: u32| -> (Vec<Keyed>, Option<ChainFailure>) {
        let t = config.temperatures[temp_idx];
        let mut history: Vec<PromptExchange> = Vec::with_capacity(items.len());
        let mut records: Vec<Keyed> = Vec::with_capacity(items.len());
        for item in &items {
            let attempt = (|| -> Result<String, BackendError> {
                let prompt = render_with_memory(instrument, item, &history)
                    .map_err(|e| BackendError::InvalidRequest(e.to_string()))?;
                guard_context(config, prompt.token_estimate)?;
                let request = CompletionRequest {
                    prompt: prompt.text.clone(),
                    temperature: t,
                    max_tokens,
                    model: config.backend.model.clone(),
                    tag: Some(RequestTag {
                        instrument_id: instrument.id.clone(),
                        item_id: item.id.clone(),
                        rep: chain,
                    }),
                };
                let text = complete_with_retry(backend, &request, &config.backend.retry, &limiter)?;
                records.push((
                    item.ordinal,
                    temp_idx,
                    chain,
                    RawResponse {
                        instrument_id: instrument.id.clone(),
                        item_id: item.id.clone(),
                        temperature: t,
                        rep: chain,
                        prompt_hash: sha256_hex(prompt.text.as_bytes()),
                        raw_text: text.clone(),
                        timestamp: Utc::now(),
                        backend_meta: Default::default(),
                    },
                ));
                Ok(text)
            })();
            match attempt {
                Ok(text) => history.push(PromptExchange {
                    item_ordinal: item.ordinal,
                    statement: item.text.clone(),
                    response: strip_newlines(&text),
                }),
                Err(e) => {
                    for (_, _, _, record) in &mut records {
                        record.backend_meta.insert("partial".into(), "true".into());
                    }
                    return (
                        records,
                        Some(ChainFailure {
                            temperature: t,
                            chain,
                            failed_at_ordinal: item.ordinal,
                            error: e.to_string(),
                        }),
                    );
                }
            }
        }
        (records, None)
    };

    let workers = config.backend.parallelism.max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                if idx >= chains.len() {
                    break;
                }
                let (temp_idx, chain) = chains[idx];
                let (records, failure) = run_chain(temp_idx, chain);
                keyed.lock().unwrap().extend(records);
                if let Some(f) = failure {
                    failures.lock().unwrap().push(f);
                }
            });
        }
    });

    let summary = RunSummary {
        requested,
        completed: 0,
        failed_cells: Vec::new(),
        partial_chains: failures.into_inner().unwrap(),
    };
    Ok(finish(keyed.into_inner().unwrap(), summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{BackendSettings, ScriptedBackend, ScriptedProfile};
    use crate::instrument::bundled;
    use std::sync::atomic::AtomicU32;

    fn scripted_config(
        instrument_id: &str,
        mode: PromptMode,
        temps: Vec<f64>,
        n: u32,
    ) -> RunConfig {
        let inst = bundled::instrument_by_id(instrument_id).unwrap();
        RunConfig {
            instrument_id: instrument_id.into(),
            mode,
            temperatures: temps,
            samples_per_cell: n,
            samples_at_zero: 1,
            backend: BackendSettings::scripted(ScriptedProfile::flat(&inst, 4.0)),
            seed: 42,
            context_limit: 4000,
            max_tokens_likert: 16,
            max_tokens_free_text: 32,
        }
    }

    fn scripted_backend(instrument_id: &str, seed: u64) -> ScriptedBackend {
        let inst = bundled::instrument_by_id(instrument_id).unwrap();
        let profile = ScriptedProfile::flat(&inst, 4.0);
        ScriptedBackend::new(inst, profile, seed)
    }

    #[test]
    fn stateless_counts_match_protocol() {
        let config = scripted_config("hvs21", PromptMode::Stateless, vec![0.0, 0.5], 10);
        let backend = scripted_backend("hvs21", 42);
        let output = run_stateless(&config, &bundled::hvs21(), &backend).unwrap();
        assert_eq!(output.responses.len(), 21 * (1 + 10));
        assert!(output.summary.fully_successful());
        assert_eq!(output.summary.requested, 231);
        assert_eq!(output.summary.completed, 231);
    }

    #[test]
    fn demographics_full_grid_counts() {
        let temps: Vec<f64> = (0..=10).map(|i| f64::from(i) / 10.0).collect();
        let config = scripted_config("demographics", PromptMode::Stateless, temps, 100);
        let backend = scripted_backend("demographics", 42);
        let output = run_stateless(&config, &bundled::demographics(), &backend).unwrap();
        assert_eq!(output.responses.len(), 2 * (1 + 10 * 100));
        // n = 1 at temperature 0.0, 100 elsewhere.
        let at_zero = output
            .responses
            .iter()
            .filter(|r| r.temperature == 0.0 && r.item_id == "age")
            .count();
        assert_eq!(at_zero, 1);
    }

    #[test]
    fn single_item_single_zero_temperature() {
        let inst = bundled::demographics();
        let mut config = scripted_config("demographics", PromptMode::Stateless, vec![0.0], 100);
        config.samples_at_zero = 1;
        let backend = scripted_backend("demographics", 42);
        let output = run_stateless(&config, &inst, &backend).unwrap();
        assert_eq!(output.responses.len(), 2); // one record per item
        assert_eq!(
            output
                .responses
                .iter()
                .filter(|r| r.item_id == "age")
                .count(),
            1
        );
    }

    #[test]
    fn output_order_is_canonical_across_parallelism() {
        let mut config = scripted_config("hvs21", PromptMode::Stateless, vec![0.0, 0.3, 0.8], 5);
        let backend = scripted_backend("hvs21", 42);
        config.backend.parallelism = 1;
        let serial = run_stateless(&config, &bundled::hvs21(), &backend).unwrap();
        config.backend.parallelism = 8;
        let parallel = run_stateless(&config, &bundled::hvs21(), &backend).unwrap();
        let key = |r: &RawResponse| {
            (
                r.item_id.clone(),
                r.temperature.to_bits(),
                r.rep,
                r.raw_text.clone(),
            )
        };
        assert_eq!(
            serial.responses.iter().map(key).collect::<Vec<_>>(),
            parallel.responses.iter().map(key).collect::<Vec<_>>()
        );
    }

    #[test]
    fn memory_chain_prompts_carry_history() {
        let config = scripted_config("hvs21", PromptMode::Memory, vec![0.0], 3);
        let inst = bundled::hvs21();
        let backend = scripted_backend("hvs21", 42);
        let output = run_memory(&config, &inst, &backend).unwrap();
        assert_eq!(output.responses.len(), 21);
        // Re-render each prompt from the logged chain and check the stored hash.
        let mut history = Vec::new();
        let mut by_ordinal: Vec<&RawResponse> = output.responses.iter().collect();
        by_ordinal.sort_by_key(|r| inst.item_by_id(&r.item_id).unwrap().ordinal);
        for record in by_ordinal {
            let item = inst.item_by_id(&record.item_id).unwrap();
            let prompt = render_with_memory(&inst, item, &history).unwrap();
            assert_eq!(record.prompt_hash, sha256_hex(prompt.text.as_bytes()));
            history.push(PromptExchange {
                item_ordinal: item.ordinal,
                statement: item.text.clone(),
                response: strip_newlines(&record.raw_text),
            });
        }
    }

    #[test]
    fn replay_closure_reproduces_raw_text() {
        let config = scripted_config("hvs21", PromptMode::Stateless, vec![0.0, 0.6], 4);
        let backend = scripted_backend("hvs21", 42);
        let first = run_stateless(&config, &bundled::hvs21(), &backend).unwrap();
        let replay = crate::backend::ReplayBackend::from_log(&first.responses);
        let second = run_stateless(&config, &bundled::hvs21(), &replay).unwrap();
        let texts = |out: &RunOutput| {
            out.responses
                .iter()
                .map(|r| r.raw_text.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(texts(&first), texts(&second));
    }

    /// Fails permanently for one item, succeeds otherwise.
    struct FailingAt<'a> {
        inner: &'a dyn CompletionBackend,
        fail_item: &'a str,
    }

    impl CompletionBackend for FailingAt<'_> {
        fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
            if request.tag.as_ref().map(|t| t.item_id.as_str()) == Some(self.fail_item) {
                return Err(BackendError::Http {
                    status: 400,
                    body: "bad request".into(),
                });
            }
            self.inner.complete(request)
        }
    }

    #[test]
    fn failed_chain_keeps_prefix_flagged_partial() {
        let config = scripted_config("hvs21", PromptMode::Memory, vec![0.0], 3);
        let inst = bundled::hvs21();
        let scripted = scripted_backend("hvs21", 42);
        let backend = FailingAt {
            inner: &scripted,
            fail_item: "hvs07",
        };
        let output = run_memory(&config, &inst, &backend).unwrap();
        assert_eq!(output.responses.len(), 6);
        assert!(output.responses.iter().all(|r| r.is_partial()));
        assert_eq!(output.summary.partial_chains.len(), 1);
        assert_eq!(output.summary.partial_chains[0].failed_at_ordinal, 7);
    }

    #[test]
    fn failed_cell_is_dropped_and_reported() {
        let config = scripted_config("hvs21", PromptMode::Stateless, vec![0.0, 0.5], 3);
        let inst = bundled::hvs21();
        let scripted = scripted_backend("hvs21", 42);
        let backend = FailingAt {
            inner: &scripted,
            fail_item: "hvs02",
        };
        let output = run_stateless(&config, &inst, &backend).unwrap();
        // hvs02 fails at both temperatures; the other 20 items are complete.
        assert_eq!(output.responses.len(), 20 * (1 + 3));
        assert_eq!(output.summary.failed_cells.len(), 2);
        assert!(output
            .summary
            .failed_cells
            .iter()
            .all(|f| f.item_id == "hvs02"));
    }

    /// Counts calls and fails the first `failures` attempts with a 500.
    struct Flaky<'a> {
        inner: &'a dyn CompletionBackend,
        failures: u32,
        calls: AtomicU32,
    }

    impl CompletionBackend for Flaky<'_> {
        fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            if n < self.failures {
                return Err(BackendError::Http {
                    status: 500,
                    body: "flaky".into(),
                });
            }
            self.inner.complete(request)
        }
    }

    #[test]
    fn transient_failures_are_retried() {
        let inst = bundled::hvs21();
        let scripted = scripted_backend("hvs21", 42);
        let flaky = Flaky {
            inner: &scripted,
            failures: 2,
            calls: AtomicU32::new(0),
        };
        let policy = RetryPolicy {
            max_attempts: 5,
            base_delay_ms: 1,
            max_delay_ms: 4,
        };
        let limiter = RateLimiter::new(600_000);
        let item = inst.item_by_ordinal(1).unwrap();
        let request = CompletionRequest {
            prompt: render_stateless(&inst, item).text,
            temperature: 0.0,
            max_tokens: 16,
            model: "m".into(),
            tag: Some(RequestTag {
                instrument_id: inst.id.clone(),
                item_id: item.id.clone(),
                rep: 0,
            }),
        };
        let text = complete_with_retry(&flaky, &request, &policy, &limiter).unwrap();
        assert_eq!(text, " 3"); // flat profile at 4.0, inverted
        assert_eq!(flaky.calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn exhausted_retries_surface_the_last_error() {
        let inst = bundled::hvs21();
        let scripted = scripted_backend("hvs21", 42);
        let flaky = Flaky {
            inner: &scripted,
            failures: u32::MAX,
            calls: AtomicU32::new(0),
        };
        let policy = RetryPolicy {
            max_attempts: 3,
            base_delay_ms: 1,
            max_delay_ms: 2,
        };
        let limiter = RateLimiter::new(600_000);
        let item = inst.item_by_ordinal(1).unwrap();
        let request = CompletionRequest {
            prompt: "Statement: x".into(),
            temperature: 0.0,
            max_tokens: 16,
            model: "m".into(),
            tag: Some(RequestTag {
                instrument_id: inst.id.clone(),
                item_id: item.id.clone(),
                rep: 0,
            }),
        };
        match complete_with_retry(&flaky, &request, &policy, &limiter).unwrap_err() {
            BackendError::Exhausted { attempts, .. } => assert_eq!(attempts, 3),
            other => panic!("expected exhaustion, got {other}"),
        }
    }

    #[test]
    fn context_guard_refuses_locally() {
        let mut config = scripted_config("hvs21", PromptMode::Stateless, vec![0.0], 1);
        config.context_limit = 50; // guard at 45 tokens; every prompt is larger
        let inst = bundled::hvs21();
        let scripted = scripted_backend("hvs21", 42);
        let counting = Flaky {
            inner: &scripted,
            failures: 0,
            calls: AtomicU32::new(0),
        };
        let output = run_stateless(&config, &inst, &counting).unwrap();
        assert!(output.responses.is_empty());
        assert_eq!(output.summary.failed_cells.len(), 21);
        // The guard fires before any request reaches the backend.
        assert_eq!(counting.calls.load(Ordering::SeqCst), 0);
        assert!(output.summary.failed_cells[0]
            .error
            .contains("context guard"));
    }

    #[test]
    fn chains_are_isolated() {
        let config = scripted_config("hvs21", PromptMode::Memory, vec![0.0, 0.5], 2);
        let inst = bundled::hvs21();
        let backend = scripted_backend("hvs21", 42);
        let output = run_memory(&config, &inst, &backend).unwrap();
        // 1 chain at 0.0 plus 2 chains at 0.5, each with 21 items.
        assert_eq!(output.responses.len(), 21 * 3);
        // Chains at the same temperature share the item sequence but may
        // diverge in raw_text; item 1 prompts are identical across chains.
        let item1: Vec<&RawResponse> = output
            .responses
            .iter()
            .filter(|r| r.item_id == "hvs01" && r.temperature == 0.5)
            .collect();
        assert_eq!(item1.len(), 2);
        assert_eq!(item1[0].prompt_hash, item1[1].prompt_hash);
        assert_ne!(item1[0].rep, item1[1].rep);
    }

    #[test]
    fn config_validation_rejects_bad_grids() {
        let mut config = scripted_config("hvs21", PromptMode::Stateless, vec![0.5, 0.5], 3);
        assert!(config.validate().is_err()); // duplicate
        config.temperatures = vec![0.5, 0.2];
        assert!(config.validate().is_err()); // descending
        config.temperatures = vec![0.5, 1.2];
        assert!(config.validate().is_err()); // out of range
        config.temperatures = vec![];
        assert!(config.validate().is_err()); // empty
        config.temperatures = vec![0.0, 0.5];
        config.samples_per_cell = 0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let config = scripted_config("hvs21", PromptMode::Memory, vec![0.0], 1);
        let backend = scripted_backend("hvs21", 1);
        assert!(run_stateless(&config, &bundled::hvs21(), &backend).is_err());
    }

    #[test]
    fn rate_limiter_throttles_after_burst() {
        let limiter = RateLimiter::new(120); // 2 per second, burst of 2
        let start = Instant::now();
        limiter.acquire();
        limiter.acquire();
        assert!(start.elapsed() < Duration::from_millis(200));
        limiter.acquire();
        assert!(start.elapsed() >= Duration::from_millis(300));
    }
}
