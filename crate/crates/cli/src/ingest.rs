//! Adapter from externally published response datasets to the canonical raw
//! log format. Every layout assumption lives here, behind a schema check that
//! reports a column diff instead of guessing.
//!
//! Expected input: a directory of CSV files, one per (instrument, mode).
//! Instrument and mode are recognized from the file name (hexaco / hvs /
//! demographic; "memory" or "reinforced" marks response-memory data). Each
//! file must carry, under any of the accepted aliases, an item identifier, a
//! temperature, and a response text column; a repetition/chain index is used
//! when present and synthesized from row order within (item, temperature)
//! otherwise.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use surveyor_core::backend::{
    sha256_hex, write_jsonl, write_manifest, BackendKind, BackendSettings, RawResponse,
    RetryPolicy, RunConfig, RunManifest,
};
use surveyor_core::instrument::{bundled, Instrument, Item};
use surveyor_core::prompt::{render_stateless, render_with_memory, PromptExchange, PromptMode};

const ITEM_ALIASES: &[&str] = &[
    "item",
    "item_id",
    "item_number",
    "question",
    "question_id",
    "question_number",
    "q",
];
const TEMPERATURE_ALIASES: &[&str] = &["temperature", "temp"];
const REP_ALIASES: &[&str] = &[
    "rep",
    "repetition",
    "sample",
    "sample_id",
    "iteration",
    "chain",
    "chain_id",
    "run",
    "index",
];
const RESPONSE_ALIASES: &[&str] = &[
    "response",
    "response_text",
    "answer",
    "answer_text",
    "completion",
    "raw_response",
    "text",
    "output",
];

pub struct IngestReport {
    pub summary: Vec<String>,
    pub artifacts: Vec<PathBuf>,
}

struct FilePlan {
    path: PathBuf,
    instrument: Instrument,
    mode: PromptMode,
}

fn classify(path: &Path) -> Option<(Instrument, PromptMode)> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().to_lowercase())
        .unwrap_or_default();
    let instrument = if name.contains("hexaco") {
        bundled::hexaco60()
    } else if name.contains("hvs") || name.contains("value") {
        bundled::hvs21()
    } else if name.contains("demo") || name.contains("age") || name.contains("gender") {
        bundled::demographics()
    } else {
        return None;
    };
    let mode = if name.contains("memory") || name.contains("reinforc") {
        PromptMode::Memory
    } else {
        PromptMode::Stateless
    };
    Some((instrument, mode))
}

fn find_column(headers: &[String], aliases: &[&str]) -> Option<usize> {
    headers
        .iter()
        .position(|h| aliases.contains(&h.to_lowercase().trim()))
}

fn resolve_item<'a>(instrument: &'a Instrument, key: &str) -> Option<&'a Item> {
    let trimmed = key.trim();
    if let Ok(ordinal) = trimmed.parse::<u32>() {
        if let Some(item) = instrument.item_by_ordinal(ordinal) {
            return Some(item);
        }
    }
    instrument
        .item_by_id(trimmed)
        .or_else(|| instrument.item_by_text(trimmed))
}

/// (ordinal, temperature bits, rep, temperature, response text).
type KeyedRow = (u32, u64, u32, f64, String);

/// (ordinal, temperature, response text) within one chain.
type ChainEntry = (u32, f64, String);

struct ParsedRow {
    item_ordinal: u32,
    temperature: f64,
    rep: Option<u32>,
    response: String,
}

fn read_rows(path: &Path, instrument: &Instrument) -> Result<Vec<ParsedRow>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| format!("{}: {e}", path.display()))?
        .iter()
        .map(|h| h.to_string())
        .collect();

    let item_col = find_column(&headers, ITEM_ALIASES);
    let temp_col = find_column(&headers, TEMPERATURE_ALIASES);
    let resp_col = find_column(&headers, RESPONSE_ALIASES);
    let rep_col = find_column(&headers, REP_ALIASES);
    let mut missing = Vec::new();
    if item_col.is_none() {
        missing.push(format!("item (any of {ITEM_ALIASES:?})"));
    }
    if temp_col.is_none() {
        missing.push(format!("temperature (any of {TEMPERATURE_ALIASES:?})"));
    }
    if resp_col.is_none() {
        missing.push(format!("response (any of {RESPONSE_ALIASES:?})"));
    }
    if !missing.is_empty() {
        return Err(format!(
            "{}: schema drift: found columns {headers:?}; missing {}",
            path.display(),
            missing.join("; ")
        ));
    }
    let (item_col, temp_col, resp_col) = (item_col.unwrap(), temp_col.unwrap(), resp_col.unwrap());

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("{}:{}: {e}", path.display(), i + 2))?;
        let get = |col: usize| record.get(col).unwrap_or("").to_string();
        let item_key = get(item_col);
        let item = resolve_item(instrument, &item_key).ok_or_else(|| {
            format!(
                "{}:{}: unknown item `{item_key}` for instrument {}",
                path.display(),
                i + 2,
                instrument.id
            )
        })?;
        let temperature: f64 = get(temp_col).trim().parse().map_err(|_| {
            format!(
                "{}:{}: bad temperature `{}`",
                path.display(),
                i + 2,
                get(temp_col)
            )
        })?;
        let rep = match rep_col {
            Some(col) => {
                let raw = get(col);
                let trimmed = raw.trim().to_string();
                if trimmed.is_empty() {
                    None
                } else {
                    Some(trimmed.parse::<u32>().map_err(|_| {
                        format!("{}:{}: bad rep `{trimmed}`", path.display(), i + 2)
                    })?)
                }
            }
            None => None,
        };
        rows.push(ParsedRow {
            item_ordinal: item.ordinal,
            temperature,
            rep,
            response: get(resp_col),
        });
    }
    Ok(rows)
}

fn convert_file(plan: &FilePlan, out_dir: &Path) -> Result<(PathBuf, PathBuf, usize), String> {
    let rows = read_rows(&plan.path, &plan.instrument)?;
    if rows.is_empty() {
        return Err(format!("{}: no data rows", plan.path.display()));
    }

    // Synthesize missing rep indices from row order within (item, temperature).
    let mut counters: BTreeMap<(u32, u64), u32> = BTreeMap::new();
    let mut keyed: Vec<KeyedRow> = Vec::new();
    for row in &rows {
        let rep = match row.rep {
            Some(r) => r,
            None => {
                let counter = counters
                    .entry((row.item_ordinal, row.temperature.to_bits()))
                    .or_insert(0);
                let r = *counter;
                *counter += 1;
                r
            }
        };
        keyed.push((
            row.item_ordinal,
            row.temperature.to_bits(),
            rep,
            row.temperature,
            row.response.clone(),
        ));
    }
    keyed.sort_by_key(|k| (k.0, k.1, k.2));

    // Re-render prompts to recover hashes; memory chains rebuild their own
    // history in ordinal order.
    let mut responses = Vec::with_capacity(keyed.len());
    match plan.mode {
        PromptMode::Stateless => {
            for (ordinal, _, rep, temperature, text) in &keyed {
                let item = plan.instrument.item_by_ordinal(*ordinal).expect("resolved");
                let prompt = render_stateless(&plan.instrument, item);
                responses.push(build_response(
                    plan,
                    item,
                    *temperature,
                    *rep,
                    text,
                    &prompt.text,
                ));
            }
        }
        PromptMode::Memory => {
            let mut chains: BTreeMap<(u64, u32), Vec<ChainEntry>> = BTreeMap::new();
            for (ordinal, bits, rep, temperature, text) in &keyed {
                chains.entry((*bits, *rep)).or_default().push((
                    *ordinal,
                    *temperature,
                    text.clone(),
                ));
            }
            for ((_, rep), chain) in &chains {
                let mut history: Vec<PromptExchange> = Vec::new();
                for (ordinal, temperature, text) in chain {
                    let item = plan.instrument.item_by_ordinal(*ordinal).expect("resolved");
                    let prompt =
                        render_with_memory(&plan.instrument, item, &history).map_err(|e| {
                            format!("{}: chain is not contiguous: {e}", plan.path.display())
                        })?;
                    responses.push(build_response(
                        plan,
                        item,
                        *temperature,
                        *rep,
                        text,
                        &prompt.text,
                    ));
                    history.push(PromptExchange {
                        item_ordinal: item.ordinal,
                        statement: item.text.clone(),
                        response: text.replace(['\n', '\r'], ""),
                    });
                }
            }
            responses.sort_by(|a, b| {
                let oa = plan.instrument.item_by_id(&a.item_id).unwrap().ordinal;
                let ob = plan.instrument.item_by_id(&b.item_id).unwrap().ordinal;
                (oa, a.temperature.to_bits(), a.rep).cmp(&(ob, b.temperature.to_bits(), b.rep))
            });
        }
    }

    let mut temperatures: Vec<u64> = responses.iter().map(|r| r.temperature.to_bits()).collect();
    temperatures.sort_unstable();
    temperatures.dedup();
    let temperatures: Vec<f64> = temperatures.into_iter().map(f64::from_bits).collect();
    let max_per_cell = responses.iter().map(|r| r.rep + 1).max().unwrap_or(1);

    let suffix = match plan.mode {
        PromptMode::Stateless => "",
        PromptMode::Memory => "_memory",
    };
    let stem = format!("{}{suffix}", plan.instrument.id);
    let log_path = out_dir.join(format!("raw_{stem}.jsonl"));
    let manifest_path = out_dir.join(format!("manifest_{stem}.json"));

    let config = RunConfig {
        instrument_id: plan.instrument.id.clone(),
        mode: plan.mode,
        temperatures,
        samples_per_cell: max_per_cell,
        samples_at_zero: 1,
        backend: BackendSettings {
            kind: BackendKind::Replay,
            endpoint: None,
            model: "ingested".into(),
            parallelism: 1,
            rate_limit_per_min: 60,
            retry: RetryPolicy::default(),
            scripted: None,
            replay_log: Some(log_path.clone()),
        },
        seed: 0,
        context_limit: 4000,
        max_tokens_likert: 16,
        max_tokens_free_text: 32,
    };
    config.validate().map_err(|e| e.to_string())?;
    let manifest = RunManifest::new(config, &plan.instrument.version);

    let count = responses.len();
    write_jsonl(&log_path, &responses).map_err(|e| e.to_string())?;
    write_manifest(&manifest_path, &manifest).map_err(|e| e.to_string())?;
    Ok((log_path, manifest_path, count))
}

fn build_response(
    plan: &FilePlan,
    item: &Item,
    temperature: f64,
    rep: u32,
    text: &str,
    prompt: &str,
) -> RawResponse {
    let mut meta = BTreeMap::new();
    meta.insert("ingested".to_string(), "true".to_string());
    meta.insert(
        "source_file".to_string(),
        plan.path
            .file_name()
            .map(|n| n.to_string_lossy().to_string())
            .unwrap_or_default(),
    );
    RawResponse {
        instrument_id: plan.instrument.id.clone(),
        item_id: item.id.clone(),
        temperature,
        rep,
        prompt_hash: sha256_hex(prompt.as_bytes()),
        raw_text: text.to_string(),
        timestamp: chrono::Utc::now(),
        backend_meta: meta,
    }
}

pub fn ingest_dataset(dataset: &Path, out_dir: &Path) -> Result<IngestReport, String> {
    if !dataset.is_dir() {
        return Err(format!("{} is not a directory", dataset.display()));
    }
    let mut plans = Vec::new();
    let mut entries: Vec<PathBuf> = walk_csv_files(dataset)?;
    entries.sort();
    for path in entries {
        if let Some((instrument, mode)) = classify(&path) {
            plans.push(FilePlan {
                path,
                instrument,
                mode,
            });
        }
    }
    if plans.is_empty() {
        return Err(format!(
            "no recognizable CSV files under {} (expected names containing hexaco, hvs/value, or demo)",
            dataset.display()
        ));
    }

    fs::create_dir_all(out_dir).map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    let mut artifacts = Vec::new();
    for plan in &plans {
        let (log_path, manifest_path, count) = convert_file(plan, out_dir)?;
        summary.push(format!(
            "{} -> {} ({count} records)",
            plan.path.display(),
            log_path.display()
        ));
        artifacts.push(log_path);
        artifacts.push(manifest_path);
    }
    Ok(IngestReport { summary, artifacts })
}

fn walk_csv_files(dir: &Path) -> Result<Vec<PathBuf>, String> {
    let mut out = Vec::new();
    let entries = fs::read_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    for entry in entries {
        let entry = entry.map_err(|e| e.to_string())?;
        let path = entry.path();
        if path.is_dir() {
            out.extend(walk_csv_files(&path)?);
        } else if path.extension().map(|e| e == "csv").unwrap_or(false) {
            out.push(path);
        }
    }
    Ok(out)
}
