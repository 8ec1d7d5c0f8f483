//! Command implementations shared by the binary and its integration tests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use surveyor_core::backend::{
    run_memory, run_stateless, write_jsonl, write_manifest, BackendKind, BackendSettings,
    CompletionBackend, HttpBackend, ReplayBackend, RunManifest, RunOutput, ScriptedBackend,
    ScriptedProfile,
};
use surveyor_core::instrument::{bundled, load_instrument, BaselineTable, Instrument};
use surveyor_core::parse::{clean_run, read_cleaned_jsonl, write_cleaned_jsonl, GenderMap};
use surveyor_core::prompt::{render_stateless, render_with_memory, PromptExchange, PromptMode};
use surveyor_core::report::{
    analyze_demographics, analyze_profiles, compare_to_baseline, comparison_table,
    correlation_table, correlation_table_long, demographics_table, table_by_temperature,
    ReferenceMatrix, Table, TableKind, TableSpec,
};
use surveyor_core::score::{
    assemble_respondents, demographic_rows, read_profiles_csv, write_profiles_csv, ScoringPolicy,
};

pub struct Context {
    pub out_dir: PathBuf,
    pub seed_override: Option<u64>,
    pub dry_run: bool,
    pub verbose: bool,
}

/// Outcome of one command: exit code, human-readable summary lines (stderr),
/// and the artifact files written.
pub struct CommandOutcome {
    pub exit_code: u8,
    pub summary: Vec<String>,
    pub artifact_paths: Vec<PathBuf>,
}

impl CommandOutcome {
    fn success(summary: Vec<String>, artifact_paths: Vec<PathBuf>) -> Self {
        CommandOutcome {
            exit_code: 0,
            summary,
            artifact_paths,
        }
    }

    fn user_error(message: String) -> Self {
        CommandOutcome {
            exit_code: 1,
            summary: vec![format!("error: {message}")],
            artifact_paths: Vec::new(),
        }
    }

    fn runtime_error(message: String) -> Self {
        CommandOutcome {
            exit_code: 2,
            summary: vec![format!("error: {message}")],
            artifact_paths: Vec::new(),
        }
    }
}

/// Resolves an instrument argument: a readable path first, then a bundled id.
fn resolve_instrument(arg: &str) -> Result<Instrument, String> {
    let path = Path::new(arg);
    if path.exists() {
        let content =
            fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        return load_instrument(&content).map_err(|e| e.to_string());
    }
    bundled::instrument_by_id(arg)
        .ok_or_else(|| format!("`{arg}` is neither a readable file nor a bundled instrument id"))
}

fn resolve_baselines(arg: &str, instrument: &Instrument) -> Result<Vec<BaselineTable>, String> {
    let document = match arg {
        "hexaco" => bundled::HEXACO_BASELINES.to_string(),
        "hvs" => bundled::HVS_BASELINES.to_string(),
        path => fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?,
    };
    surveyor_core::instrument::load_baselines(&document, instrument).map_err(|e| e.to_string())
}

fn resolve_reference(arg: &str) -> Result<ReferenceMatrix, String> {
    match arg {
        "hexaco" => Ok(ReferenceMatrix::bundled_hexaco()),
        "hvs" => Ok(ReferenceMatrix::bundled_hvs()),
        path => {
            let content =
                fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
            ReferenceMatrix::load(&content)
        }
    }
}

fn write_text(path: &Path, content: &str) -> Result<(), String> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| e.to_string())?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, content).map_err(|e| e.to_string())?;
    fs::rename(&tmp, path).map_err(|e| e.to_string())
}

fn write_table(out_dir: &Path, table: &Table, artifacts: &mut Vec<PathBuf>) -> Result<(), String> {
    let csv_path = out_dir.join(format!("{}.csv", table.id));
    write_text(&csv_path, &table.to_csv_string())?;
    artifacts.push(csv_path);
    let md_path = out_dir.join(format!("{}.md", table.id));
    write_text(&md_path, &table.to_markdown_string())?;
    artifacts.push(md_path);
    Ok(())
}

pub fn cmd_validate(_ctx: &Context, instrument_arg: &str) -> CommandOutcome {
    let path = Path::new(instrument_arg);
    if !path.exists() && bundled::instrument_by_id(instrument_arg).is_none() {
        return CommandOutcome::user_error(format!("no such file or bundled id: {instrument_arg}"));
    }
    match resolve_instrument(instrument_arg) {
        Ok(instrument) => {
            let scale = instrument
                .scale
                .as_ref()
                .map(|s| format!("scale {}-{}", s.min, s.max))
                .unwrap_or_else(|| "free text".into());
            CommandOutcome::success(
                vec![format!(
                    "{}: {} items, {} constructs, {scale}",
                    instrument.id,
                    instrument.items.len(),
                    instrument.constructs.len()
                )],
                Vec::new(),
            )
        }
        Err(message) => CommandOutcome::user_error(message),
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

/// On-disk run configuration; `instrument` is a bundled id or a path.
#[derive(Debug, Deserialize)]
struct RunFile {
    instrument: String,
    mode: PromptMode,
    temperatures: Vec<f64>,
    samples_per_cell: u32,
    #[serde(default = "default_samples_at_zero")]
    samples_at_zero: u32,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_context_limit")]
    context_limit: u32,
    #[serde(default = "default_max_tokens_likert")]
    max_tokens_likert: u32,
    #[serde(default = "default_max_tokens_free_text")]
    max_tokens_free_text: u32,
    backend: BackendSettings,
}

fn build_backend(
    config: &surveyor_core::backend::RunConfig,
    instrument: &Instrument,
) -> Result<Box<dyn CompletionBackend>, String> {
    match config.backend.kind {
        BackendKind::Scripted => {
            let profile = config
                .backend
                .scripted
                .clone()
                .unwrap_or_else(|| ScriptedProfile::flat(instrument, 4.0));
            Ok(Box::new(ScriptedBackend::new(
                instrument.clone(),
                profile,
                config.seed,
            )))
        }
        BackendKind::Http => {
            let endpoint = config
                .backend
                .endpoint
                .as_deref()
                .ok_or("http backend requires `endpoint`")?;
            Ok(Box::new(
                HttpBackend::new(endpoint, None).map_err(|e| e.to_string())?,
            ))
        }
        BackendKind::Replay => {
            let path = config
                .backend
                .replay_log
                .as_ref()
                .ok_or("replay backend requires `replay_log`")?;
            Ok(Box::new(
                ReplayBackend::from_file(path).map_err(|e| e.to_string())?,
            ))
        }
    }
}

fn dry_run_report(
    config: &surveyor_core::backend::RunConfig,
    instrument: &Instrument,
) -> Vec<String> {
    let items = instrument.items_by_ordinal();
    let mut max_estimate = 0;
    match config.mode {
        PromptMode::Stateless => {
            for item in &items {
                max_estimate = max_estimate.max(render_stateless(instrument, item).token_estimate);
            }
        }
        PromptMode::Memory => {
            // Upper-bound history: every prior answer present, short numeric.
            let mut history: Vec<PromptExchange> = Vec::new();
            for item in &items {
                let prompt = render_with_memory(instrument, item, &history)
                    .expect("synthetic history is complete");
                max_estimate = max_estimate.max(prompt.token_estimate);
                history.push(PromptExchange {
                    item_ordinal: item.ordinal,
                    statement: item.text.clone(),
                    response: " 5".into(),
                });
            }
        }
    }
    let requests: usize = match config.mode {
        PromptMode::Stateless => config
            .temperatures
            .iter()
            .map(|t| config.samples_at(*t) as usize * items.len())
            .sum(),
        PromptMode::Memory => config
            .temperatures
            .iter()
            .map(|t| config.samples_at(*t) as usize * items.len())
            .sum(),
    };
    vec![
        format!("dry run: {requests} requests planned, nothing sent"),
        format!(
            "dry run: max prompt estimate {max_estimate} tokens (context guard {})",
            (f64::from(config.context_limit) * 0.9).floor() as u32
        ),
    ]
}

pub fn cmd_run(ctx: &Context, config_path: &Path) -> CommandOutcome {
    let content = match fs::read_to_string(config_path) {
        Ok(c) => c,
        Err(e) => {
            return CommandOutcome::user_error(format!(
                "cannot read {}: {e}",
                config_path.display()
            ))
        }
    };
    let run_file: RunFile = match toml::from_str(&content) {
        Ok(f) => f,
        Err(e) => return CommandOutcome::user_error(format!("bad run config: {e}")),
    };
    let instrument = match resolve_instrument(&run_file.instrument) {
        Ok(i) => i,
        Err(message) => return CommandOutcome::user_error(message),
    };
    let mut config = surveyor_core::backend::RunConfig {
        instrument_id: instrument.id.clone(),
        mode: run_file.mode,
        temperatures: run_file.temperatures,
        samples_per_cell: run_file.samples_per_cell,
        samples_at_zero: run_file.samples_at_zero,
        backend: run_file.backend,
        seed: run_file.seed,
        context_limit: run_file.context_limit,
        max_tokens_likert: run_file.max_tokens_likert,
        max_tokens_free_text: run_file.max_tokens_free_text,
    };
    if let Some(seed) = ctx.seed_override {
        config.seed = seed;
    }
    if let Err(e) = config.validate() {
        return CommandOutcome::user_error(e.to_string());
    }

    if ctx.dry_run {
        return CommandOutcome::success(dry_run_report(&config, &instrument), Vec::new());
    }

    let backend = match build_backend(&config, &instrument) {
        Ok(b) => b,
        Err(message) => return CommandOutcome::user_error(message),
    };
    let result = match config.mode {
        PromptMode::Stateless => run_stateless(&config, &instrument, backend.as_ref()),
        PromptMode::Memory => run_memory(&config, &instrument, backend.as_ref()),
    };
    let output: RunOutput = match result {
        Ok(o) => o,
        Err(e) => return CommandOutcome::runtime_error(e.to_string()),
    };

    if let Err(e) = fs::create_dir_all(&ctx.out_dir) {
        return CommandOutcome::runtime_error(e.to_string());
    }
    let log_path = ctx.out_dir.join("raw.jsonl");
    let manifest_path = ctx.out_dir.join("manifest.json");
    let manifest = RunManifest::new(config, &instrument.version);
    if let Err(e) = write_jsonl(&log_path, &output.responses) {
        return CommandOutcome::runtime_error(e.to_string());
    }
    if let Err(e) = write_manifest(&manifest_path, &manifest) {
        return CommandOutcome::runtime_error(e.to_string());
    }

    let mut summary = vec![
        format!(
            "run complete: {} responses ({} requested), manifest {}",
            output.summary.completed,
            output.summary.requested,
            manifest.hash()
        ),
        format!("wrote {}", log_path.display()),
        format!("wrote {}", manifest_path.display()),
    ];
    for failure in &output.summary.failed_cells {
        summary.push(format!(
            "failed cell: item {} at temperature {}: {}",
            failure.item_id, failure.temperature, failure.error
        ));
    }
    for failure in &output.summary.partial_chains {
        summary.push(format!(
            "partial chain {} at temperature {}: failed at item {}: {}",
            failure.chain, failure.temperature, failure.failed_at_ordinal, failure.error
        ));
    }
    let exit_code = if output.summary.fully_successful() {
        0
    } else {
        3
    };
    CommandOutcome {
        exit_code,
        summary,
        artifact_paths: vec![log_path, manifest_path],
    }
}

pub fn cmd_ingest(ctx: &Context, dataset: &Path) -> CommandOutcome {
    match crate::ingest::ingest_dataset(dataset, &ctx.out_dir) {
        Ok(report) => CommandOutcome::success(report.summary, report.artifacts),
        Err(e) => CommandOutcome::user_error(e),
    }
}

pub fn cmd_parse(
    ctx: &Context,
    log_path: &Path,
    instrument_arg: &str,
    gender_map_path: Option<&Path>,
) -> CommandOutcome {
    let instrument = match resolve_instrument(instrument_arg) {
        Ok(i) => i,
        Err(message) => return CommandOutcome::user_error(message),
    };
    let gender_map = match gender_map_path {
        Some(path) => match fs::read_to_string(path) {
            Ok(content) => match GenderMap::load(&content) {
                Ok(map) => map,
                Err(e) => return CommandOutcome::user_error(e.to_string()),
            },
            Err(e) => {
                return CommandOutcome::user_error(format!("cannot read {}: {e}", path.display()))
            }
        },
        None => GenderMap::bundled(),
    };
    let log = match surveyor_core::backend::read_jsonl(log_path) {
        Ok(l) => l,
        Err(e) => return CommandOutcome::user_error(e.to_string()),
    };
    let (records, report) = match clean_run(&log, &instrument, &gender_map) {
        Ok(r) => r,
        Err(e) => return CommandOutcome::user_error(e.to_string()),
    };
    if let Err(e) = fs::create_dir_all(&ctx.out_dir) {
        return CommandOutcome::runtime_error(e.to_string());
    }
    let cleaned_path = ctx.out_dir.join("cleaned.jsonl");
    if let Err(e) = write_cleaned_jsonl(&cleaned_path, &records) {
        return CommandOutcome::runtime_error(e.to_string());
    }
    let report_path = ctx.out_dir.join("cleaning_report.json");
    if let Err(e) = write_text(
        &report_path,
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    ) {
        return CommandOutcome::runtime_error(e);
    }
    CommandOutcome::success(
        vec![
            format!(
                "cleaned {} records: {} NA ({:.4}%)",
                report.total,
                report.na_count,
                report.na_rate * 100.0
            ),
            format!("wrote {}", cleaned_path.display()),
            format!("wrote {}", report_path.display()),
        ],
        vec![cleaned_path, report_path],
    )
}

pub fn cmd_score(
    ctx: &Context,
    cleaned_path: &Path,
    instrument_arg: &str,
    mode_arg: &str,
) -> CommandOutcome {
    let instrument = match resolve_instrument(instrument_arg) {
        Ok(i) => i,
        Err(message) => return CommandOutcome::user_error(message),
    };
    let mode = match mode_arg {
        "stateless" => PromptMode::Stateless,
        "memory" => PromptMode::Memory,
        other => return CommandOutcome::user_error(format!("unknown mode `{other}`")),
    };
    let records = match read_cleaned_jsonl(cleaned_path) {
        Ok(r) => r,
        Err(e) => return CommandOutcome::user_error(e.to_string()),
    };
    if let Err(e) = fs::create_dir_all(&ctx.out_dir) {
        return CommandOutcome::runtime_error(e.to_string());
    }

    if instrument.kind == surveyor_core::instrument::InstrumentKind::FreeText {
        let rows = demographic_rows(&records);
        let path = ctx.out_dir.join("demographics.csv");
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["temperature", "rep", "age", "gender"])
            .expect("csv header");
        for row in &rows {
            writer
                .write_record([
                    format!("{}", row.temperature),
                    format!("{}", row.rep),
                    row.age_years.map(|v| v.to_string()).unwrap_or_default(),
                    row.gender_category.clone().unwrap_or_default(),
                ])
                .expect("csv row");
        }
        let bytes = writer.into_inner().expect("csv buffer");
        if let Err(e) = write_text(&path, &String::from_utf8(bytes).expect("utf-8")) {
            return CommandOutcome::runtime_error(e);
        }
        return CommandOutcome::success(
            vec![
                format!("wrote {} demographic rows", rows.len()),
                format!("wrote {}", path.display()),
            ],
            vec![path],
        );
    }

    let policy = ScoringPolicy::for_instrument(&instrument);
    let assembled = match assemble_respondents(&records, &instrument, mode, &policy) {
        Ok(a) => a,
        Err(e) => return CommandOutcome::user_error(e.to_string()),
    };
    let path = ctx.out_dir.join("profiles.csv");
    if let Err(e) = write_profiles_csv(&path, &assembled.profiles, &instrument) {
        return CommandOutcome::runtime_error(e.to_string());
    }
    let mut summary = vec![
        format!("wrote {} respondent profiles", assembled.profiles.len()),
        format!("wrote {}", path.display()),
    ];
    for (t, chain) in &assembled.excluded_chains {
        summary.push(format!("excluded partial chain {chain} at temperature {t}"));
    }
    CommandOutcome::success(summary, vec![path])
}

fn read_demographics_csv(path: &Path) -> Result<Vec<surveyor_core::score::DemographicRow>, String> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        let get = |i: usize| record.get(i).unwrap_or("");
        rows.push(surveyor_core::score::DemographicRow {
            temperature: get(0)
                .parse()
                .map_err(|_| format!("bad temperature `{}`", get(0)))?,
            rep: get(1)
                .parse()
                .map_err(|_| format!("bad rep `{}`", get(1)))?,
            age_years: if get(2).is_empty() {
                None
            } else {
                Some(
                    get(2)
                        .parse()
                        .map_err(|_| format!("bad age `{}`", get(2)))?,
                )
            },
            gender_category: if get(3).is_empty() {
                None
            } else {
                Some(get(3).to_string())
            },
        });
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_analyze(
    ctx: &Context,
    profiles_path: Option<&Path>,
    demographics_path: Option<&Path>,
    manifest_path: Option<&Path>,
    baselines_arg: Option<&str>,
    reference_arg: Option<&str>,
) -> CommandOutcome {
    if profiles_path.is_none() && demographics_path.is_none() {
        return CommandOutcome::user_error(
            "nothing to analyze: pass --profiles and/or --demographics".into(),
        );
    }
    let manifest_hash = match manifest_path {
        Some(path) => match surveyor_core::backend::read_manifest(path) {
            Ok(manifest) => Some(manifest.hash()),
            Err(e) => return CommandOutcome::user_error(e.to_string()),
        },
        None => None,
    };
    if let Err(e) = fs::create_dir_all(&ctx.out_dir) {
        return CommandOutcome::runtime_error(e.to_string());
    }

    let mut artifacts = Vec::new();
    let mut summary = Vec::new();
    let mut bundle = None;

    if let Some(path) = profiles_path {
        let (profiles, constructs) = match read_profiles_csv(path) {
            Ok(p) => p,
            Err(e) => return CommandOutcome::user_error(e.to_string()),
        };
        if profiles.is_empty() {
            return CommandOutcome::user_error("profiles file has no rows".into());
        }
        let instrument_id = profiles[0].instrument_id.clone();
        let mut analysis = match analyze_profiles(&profiles, &constructs, manifest_hash.clone()) {
            Ok(a) => a,
            Err(e) => return CommandOutcome::user_error(e.to_string()),
        };

        let mut spec = TableSpec::new(TableKind::ByTemperature, &instrument_id);
        let baselines = match baselines_arg {
            Some(arg) => match bundled::instrument_by_id(&instrument_id) {
                Some(instrument) => match resolve_baselines(arg, &instrument) {
                    Ok(b) => Some(b),
                    Err(e) => return CommandOutcome::user_error(e),
                },
                None => {
                    return CommandOutcome::user_error(format!(
                        "--baselines needs a bundled instrument to resolve constructs; `{instrument_id}` is not bundled"
                    ))
                }
            },
            None => None,
        };
        spec.include_baselines = baselines.is_some();
        match table_by_temperature(&profiles, &constructs, &spec, baselines.as_deref()) {
            Ok(table) => {
                if let Err(e) = write_table(&ctx.out_dir, &table, &mut artifacts) {
                    return CommandOutcome::runtime_error(e);
                }
            }
            Err(e) => summary.push(format!("by-temperature table skipped: {e}")),
        }

        if let Some(baselines) = &baselines {
            let (rows, ranges) = compare_to_baseline(&profiles, baselines);
            analysis.comparisons = rows;
            analysis.range_summaries = ranges;
            let table = comparison_table(&analysis.comparisons, spec.rounding);
            if let Err(e) = write_table(&ctx.out_dir, &table, &mut artifacts) {
                return CommandOutcome::runtime_error(e);
            }
        }

        if let Some(matrix) = &analysis.correlations {
            let reference = match reference_arg {
                Some(arg) => match resolve_reference(arg) {
                    Ok(r) => Some(r),
                    Err(e) => return CommandOutcome::user_error(e),
                },
                None => None,
            };
            match correlation_table(matrix, reference.as_ref(), spec.rounding) {
                Ok(table) => {
                    if let Err(e) = write_table(&ctx.out_dir, &table, &mut artifacts) {
                        return CommandOutcome::runtime_error(e);
                    }
                }
                Err(e) => summary.push(format!("correlation table skipped: {e}")),
            }
            let long = correlation_table_long(matrix);
            let path = ctx.out_dir.join(format!("{}.csv", long.id));
            if let Err(e) = write_text(&path, &long.to_csv_string()) {
                return CommandOutcome::runtime_error(e);
            }
            artifacts.push(path);
        }

        for warning in &analysis.warnings {
            summary.push(format!("warning: {warning}"));
        }
        if let Some(m) = &analysis.manova {
            summary.push(format!(
                "manova: F({}, {}) = {:.3}, wilks = {:.4}, p = {:.3e}",
                m.df1, m.df2, m.f_approx, m.wilks_lambda, m.p
            ));
        }
        bundle = Some(analysis);
    }

    if let Some(path) = demographics_path {
        let rows = match read_demographics_csv(path) {
            Ok(r) => r,
            Err(e) => return CommandOutcome::user_error(e),
        };
        let analysis = match analyze_demographics(&rows) {
            Ok(a) => a,
            Err(e) => return CommandOutcome::user_error(e.to_string()),
        };
        if let Some(fit) = &analysis.age_on_temperature {
            summary.push(format!(
                "age ~ temperature: beta = {:.2}, se = {:.2}, p = {:.3e}",
                fit.coef["temperature"], fit.se["temperature"], fit.p["temperature"]
            ));
        }
        if let Some(or) = analysis.odds_ratio_temperature {
            summary.push(format!(
                "non-female odds ratio per unit temperature: {or:.2}"
            ));
        }
        let table = demographics_table(&rows, 2);
        if let Err(e) = write_table(&ctx.out_dir, &table, &mut artifacts) {
            return CommandOutcome::runtime_error(e);
        }
        match &mut bundle {
            Some(b) => b.demographics = Some(analysis),
            None => {
                let mut b = surveyor_core::report::AnalysisBundle {
                    manifest_hash: manifest_hash.clone(),
                    descriptives: Default::default(),
                    regressions: Default::default(),
                    manova: None,
                    correlations: None,
                    demographics: Some(analysis),
                    comparisons: Vec::new(),
                    range_summaries: Vec::new(),
                    warnings: Vec::new(),
                };
                b.manifest_hash = manifest_hash.clone();
                bundle = Some(b);
            }
        }
    }

    let bundle = bundle.expect("at least one input produced a bundle");
    let results_path = ctx.out_dir.join("results.json");
    if let Err(e) = write_text(
        &results_path,
        &serde_json::to_string_pretty(&bundle).expect("bundle serializes"),
    ) {
        return CommandOutcome::runtime_error(e);
    }
    artifacts.push(results_path.clone());
    summary.push(format!("wrote {}", results_path.display()));
    CommandOutcome::success(summary, artifacts)
}

pub fn cmd_report(
    ctx: &Context,
    profiles_path: &Path,
    baselines_arg: Option<&str>,
    reference_arg: Option<&str>,
) -> CommandOutcome {
    let (profiles, constructs) = match read_profiles_csv(profiles_path) {
        Ok(p) => p,
        Err(e) => return CommandOutcome::user_error(e.to_string()),
    };
    if profiles.is_empty() {
        return CommandOutcome::user_error("profiles file has no rows".into());
    }
    if let Err(e) = fs::create_dir_all(&ctx.out_dir) {
        return CommandOutcome::runtime_error(e.to_string());
    }
    let instrument_id = profiles[0].instrument_id.clone();
    let mut artifacts = Vec::new();
    let mut summary = Vec::new();

    let mut spec = TableSpec::new(TableKind::ByTemperature, &instrument_id);
    let baselines = match baselines_arg {
        Some(arg) => match bundled::instrument_by_id(&instrument_id) {
            Some(instrument) => match resolve_baselines(arg, &instrument) {
                Ok(b) => Some(b),
                Err(e) => return CommandOutcome::user_error(e),
            },
            None => {
                return CommandOutcome::user_error(format!(
                    "--baselines needs a bundled instrument to resolve constructs; `{instrument_id}` is not bundled"
                ))
            }
        },
        None => None,
    };
    spec.include_baselines = baselines.is_some();
    match table_by_temperature(&profiles, &constructs, &spec, baselines.as_deref()) {
        Ok(table) => {
            if let Err(e) = write_table(&ctx.out_dir, &table, &mut artifacts) {
                return CommandOutcome::runtime_error(e);
            }
        }
        Err(e) => return CommandOutcome::user_error(e.to_string()),
    }

    if let Some(baselines) = &baselines {
        let (rows, _) = compare_to_baseline(&profiles, baselines);
        let table = comparison_table(&rows, spec.rounding);
        if let Err(e) = write_table(&ctx.out_dir, &table, &mut artifacts) {
            return CommandOutcome::runtime_error(e);
        }
    }

    let columns: Vec<Vec<Option<f64>>> = constructs
        .iter()
        .map(|c| {
            profiles
                .iter()
                .map(|p| p.scores.get(c).copied().flatten())
                .collect()
        })
        .collect();
    match surveyor_core::stats::pearson_matrix(&columns, &constructs) {
        Ok(matrix) => {
            let reference = match reference_arg {
                Some(arg) => match resolve_reference(arg) {
                    Ok(r) => Some(r),
                    Err(e) => return CommandOutcome::user_error(e),
                },
                None => None,
            };
            match correlation_table(&matrix, reference.as_ref(), spec.rounding) {
                Ok(table) => {
                    if let Err(e) = write_table(&ctx.out_dir, &table, &mut artifacts) {
                        return CommandOutcome::runtime_error(e);
                    }
                }
                Err(e) => summary.push(format!("correlation table skipped: {e}")),
            }
        }
        Err(e) => summary.push(format!("correlations skipped: {e}")),
    }

    summary.push(format!("wrote {} table files", artifacts.len()));
    CommandOutcome::success(summary, artifacts)
}
