//! End-to-end tests of the `surveyor` binary: exit codes, artifacts, and the
//! file-to-file pipeline.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use surveyor_core::backend::{read_jsonl, sha256_hex};
use surveyor_core::instrument::bundled;
use surveyor_core::prompt::{render_stateless, render_with_memory, PromptExchange};

fn surveyor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surveyor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).to_string()
}

#[test]
fn validate_bundled_instrument() {
    let output = surveyor(&["validate", "hexaco60"]);
    assert!(output.status.success());
    let err = stderr_of(&output);
    assert!(err.contains("60 items, 6 constructs, scale 1-5"), "{err}");
}

#[test]
fn validate_duplicate_item_id_fails_with_the_id() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    fs::write(
        &path,
        r#"
id = "toy"
name = "Toy"
version = "1"
kind = "likert"
instructions = "Answer."
constructs = ["bravery"]

[scale]
min = 1
max = 2
labels = ["no", "yes"]

[[items]]
id = "dup"
ordinal = 1
text = "One."
construct = "bravery"
reverse = false

[[items]]
id = "dup"
ordinal = 2
text = "Two."
construct = "bravery"
reverse = false
"#,
    )
    .unwrap();
    let output = surveyor(&["validate", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("dup"));
}

#[test]
fn validate_missing_file_fails() {
    let output = surveyor(&["validate", "/nonexistent/definitely-not-here.toml"]);
    assert_eq!(output.status.code(), Some(1));
}

fn write_run_config(dir: &Path, instrument: &str, temps: &str, samples: u32) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    fs::write(
        &path,
        format!(
            r#"
instrument = "{instrument}"
mode = "stateless"
temperatures = {temps}
samples_per_cell = {samples}
seed = 7

[backend]
kind = "scripted"
model = "scripted-v1"
parallelism = 4
rate_limit_per_min = 600000
"#
        ),
    )
    .unwrap();
    path
}

#[test]
fn run_writes_log_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_run_config(dir.path(), "hvs21", "[0.0, 0.5]", 10);
    let out_dir = dir.path().join("out");
    let output = surveyor(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let log = read_jsonl(&out_dir.join("raw.jsonl")).unwrap();
    assert_eq!(log.len(), 21 * (1 + 10));
    assert!(out_dir.join("manifest.json").exists());
}

#[test]
fn dry_run_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_run_config(dir.path(), "hvs21", "[0.0, 0.5]", 10);
    let out_dir = dir.path().join("out");
    let output = surveyor(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--dry-run",
    ]);
    assert!(output.status.success());
    let err = stderr_of(&output);
    assert!(err.contains("dry run"), "{err}");
    assert!(err.contains("231 requests"), "{err}");
    assert!(!out_dir.join("raw.jsonl").exists());
}

#[test]
fn dry_run_memory_mode_reports_peak_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("memory.toml");
    fs::write(
        &config,
        r#"
instrument = "hvs21"
mode = "memory"
temperatures = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
samples_per_cell = 10
seed = 7

[backend]
kind = "scripted"
rate_limit_per_min = 600000
"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let output = surveyor(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--dry-run",
    ]);
    assert!(output.status.success());
    let err = stderr_of(&output);
    // The peak is the final item with a full history; the guard budget is
    // printed alongside it.
    assert!(err.contains("max prompt estimate"), "{err}");
    assert!(err.contains("context guard 3600"), "{err}");
    assert!(!out_dir.exists() || fs::read_dir(&out_dir).unwrap().next().is_none());
}

#[test]
fn replay_reproduces_raw_text() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_run_config(dir.path(), "hvs21", "[0.0, 0.3]", 5);
    let first_dir = dir.path().join("first");
    let output = surveyor(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        first_dir.to_str().unwrap(),
    ]);
    assert!(output.status.success());

    let replay_config = dir.path().join("replay.toml");
    fs::write(
        &replay_config,
        format!(
            r#"
instrument = "hvs21"
mode = "stateless"
temperatures = [0.0, 0.3]
samples_per_cell = 5
seed = 7

[backend]
kind = "replay"
replay_log = "{}"
parallelism = 2
rate_limit_per_min = 600000
"#,
            first_dir.join("raw.jsonl").display()
        ),
    )
    .unwrap();
    let second_dir = dir.path().join("second");
    let output = surveyor(&[
        "run",
        "--config",
        replay_config.to_str().unwrap(),
        "--out-dir",
        second_dir.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let first = read_jsonl(&first_dir.join("raw.jsonl")).unwrap();
    let second = read_jsonl(&second_dir.join("raw.jsonl")).unwrap();
    assert_eq!(first.len(), second.len());
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(a.raw_text, b.raw_text);
        assert_eq!(a.prompt_hash, b.prompt_hash);
    }
}

#[test]
fn pipeline_run_parse_score_analyze_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_run_config(dir.path(), "hexaco60", "[0.0, 0.5, 1.0]", 10);
    let out_dir = dir.path().join("out");
    assert!(surveyor(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ])
    .status
    .success());

    let raw = out_dir.join("raw.jsonl");
    assert!(surveyor(&[
        "parse",
        "--log",
        raw.to_str().unwrap(),
        "--instrument",
        "hexaco60",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ])
    .status
    .success());

    let cleaned = out_dir.join("cleaned.jsonl");
    assert!(surveyor(&[
        "score",
        "--cleaned",
        cleaned.to_str().unwrap(),
        "--instrument",
        "hexaco60",
        "--mode",
        "stateless",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ])
    .status
    .success());

    let profiles = out_dir.join("profiles.csv");
    let analyze = |out: &Path| {
        let output = surveyor(&[
            "analyze",
            "--profiles",
            profiles.to_str().unwrap(),
            "--manifest",
            out_dir.join("manifest.json").to_str().unwrap(),
            "--baselines",
            "hexaco",
            "--reference-correlations",
            "hexaco",
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "{}", stderr_of(&output));
    };
    let analysis_a = dir.path().join("analysis_a");
    let analysis_b = dir.path().join("analysis_b");
    analyze(&analysis_a);
    analyze(&analysis_b);

    for name in [
        "results.json",
        "hexaco60_by_temperature.csv",
        "correlations.csv",
        "baseline_comparison.csv",
    ] {
        let a = fs::read(analysis_a.join(name)).unwrap();
        let b = fs::read(analysis_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs across analyze runs");
    }
    // The bundle is stamped with the manifest hash.
    let results: serde_json::Value =
        serde_json::from_slice(&fs::read(analysis_a.join("results.json")).unwrap()).unwrap();
    assert!(results["manifest_hash"].is_string());
}

#[test]
fn report_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_run_config(dir.path(), "hvs21", "[0.0, 0.5]", 8);
    let out_dir = dir.path().join("out");
    assert!(surveyor(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap()
    ])
    .status
    .success());
    assert!(surveyor(&[
        "parse",
        "--log",
        out_dir.join("raw.jsonl").to_str().unwrap(),
        "--instrument",
        "hvs21",
        "--out-dir",
        out_dir.to_str().unwrap()
    ])
    .status
    .success());
    assert!(surveyor(&[
        "score",
        "--cleaned",
        out_dir.join("cleaned.jsonl").to_str().unwrap(),
        "--instrument",
        "hvs21",
        "--out-dir",
        out_dir.to_str().unwrap()
    ])
    .status
    .success());
    let output = surveyor(&[
        "report",
        "--profiles",
        out_dir.join("profiles.csv").to_str().unwrap(),
        "--baselines",
        "hvs",
        "--reference-correlations",
        "hvs",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert!(out_dir.join("hvs21_by_temperature.csv").exists());
    assert!(out_dir.join("hvs21_by_temperature.md").exists());
    assert!(out_dir.join("correlations.md").exists());
    assert!(out_dir.join("baseline_comparison.csv").exists());
}

#[test]
fn demographics_flow_through_score_and_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_run_config(dir.path(), "demographics", "[0.0, 0.5, 1.0]", 40);
    let out_dir = dir.path().join("out");
    assert!(surveyor(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap()
    ])
    .status
    .success());
    assert!(surveyor(&[
        "parse",
        "--log",
        out_dir.join("raw.jsonl").to_str().unwrap(),
        "--instrument",
        "demographics",
        "--out-dir",
        out_dir.to_str().unwrap()
    ])
    .status
    .success());
    assert!(surveyor(&[
        "score",
        "--cleaned",
        out_dir.join("cleaned.jsonl").to_str().unwrap(),
        "--instrument",
        "demographics",
        "--out-dir",
        out_dir.to_str().unwrap()
    ])
    .status
    .success());
    let output = surveyor(&[
        "analyze",
        "--demographics",
        out_dir.join("demographics.csv").to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let err = stderr_of(&output);
    assert!(err.contains("age ~ temperature"), "{err}");
    assert!(out_dir.join("demographics_by_temperature.csv").exists());
    assert!(out_dir.join("results.json").exists());
}

#[test]
fn parse_accepts_a_custom_gender_map() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_run_config(dir.path(), "demographics", "[0.0]", 1);
    let out_dir = dir.path().join("out");
    assert!(surveyor(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap()
    ])
    .status
    .success());
    // A map that routes every female answer into a custom bucket.
    let map_path = dir.path().join("map.toml");
    fs::write(
        &map_path,
        r#"
[[rules]]
pattern = "female"
category = "bucket-a"
"#,
    )
    .unwrap();
    let output = surveyor(&[
        "parse",
        "--log",
        out_dir.join("raw.jsonl").to_str().unwrap(),
        "--instrument",
        "demographics",
        "--gender-map",
        map_path.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let cleaned = fs::read_to_string(out_dir.join("cleaned.jsonl")).unwrap();
    // The scripted default profile answers " female" at temperature 0.0.
    assert!(cleaned.contains("bucket-a"), "{cleaned}");
}

// ---------------------------------------------------------------------------
// Ingest adapter.
// ---------------------------------------------------------------------------

fn write_synthetic_dataset(dir: &Path) {
    // Stateless Hexaco responses: item by number, rep synthesized from order.
    let mut hexaco = String::from("question,temp,response\n");
    for temp in ["0.0", "0.5"] {
        for item in 1..=60 {
            for _ in 0..3 {
                hexaco.push_str(&format!("{item},{temp}, 4\n"));
            }
        }
    }
    fs::write(dir.join("hexaco_responses.csv"), hexaco).unwrap();

    // Memory-mode HVS chains with an explicit chain column.
    let mut hvs = String::from("item,temperature,chain,answer\n");
    for chain in 0..2 {
        for item in 1..=21 {
            hvs.push_str(&format!("{item},0.2,{chain}, {}\n", (item % 6) + 1));
        }
    }
    fs::write(dir.join("hvs_memory_responses.csv"), hvs).unwrap();

    // Demographics by item id.
    let mut demo = String::from("item,temp,sample,response\n");
    for rep in 0..5 {
        demo.push_str(&format!("age,0.0,{rep}, 33\n"));
        demo.push_str(&format!("gender,0.0,{rep}, female\n"));
    }
    fs::write(dir.join("demographics.csv"), demo).unwrap();
}

#[test]
fn ingest_converts_synthetic_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = dir.path().join("dataset");
    fs::create_dir_all(&dataset).unwrap();
    write_synthetic_dataset(&dataset);
    let out_dir = dir.path().join("ingested");
    let output = surveyor(&[
        "ingest",
        dataset.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));

    // Record counts are conserved.
    let hexaco = read_jsonl(&out_dir.join("raw_hexaco60.jsonl")).unwrap();
    assert_eq!(hexaco.len(), 2 * 60 * 3);
    let demo = read_jsonl(&out_dir.join("raw_demographics.jsonl")).unwrap();
    assert_eq!(demo.len(), 10);

    // Synthesized reps within a cell are 0..n in file order.
    let reps: Vec<u32> = hexaco
        .iter()
        .filter(|r| r.item_id == "hex01" && r.temperature == 0.0)
        .map(|r| r.rep)
        .collect();
    assert_eq!(reps, vec![0, 1, 2]);

    // Memory chains re-render their prompts from their own history.
    let inst = bundled::hvs21();
    let hvs = read_jsonl(&out_dir.join("raw_hvs21_memory.jsonl")).unwrap();
    assert_eq!(hvs.len(), 2 * 21);
    let chain0: Vec<_> = hvs.iter().filter(|r| r.rep == 0).collect();
    let mut history = Vec::new();
    for record in chain0 {
        let item = inst.item_by_id(&record.item_id).unwrap();
        let prompt = render_with_memory(&inst, item, &history).unwrap();
        assert_eq!(record.prompt_hash, sha256_hex(prompt.text.as_bytes()));
        history.push(PromptExchange {
            item_ordinal: item.ordinal,
            statement: item.text.clone(),
            response: record.raw_text.clone(),
        });
    }

    // Stateless records carry the stateless prompt hash.
    let first = hexaco.iter().find(|r| r.item_id == "hex01").unwrap();
    let inst = bundled::hexaco60();
    let prompt = render_stateless(&inst, inst.item_by_id("hex01").unwrap());
    assert_eq!(first.prompt_hash, sha256_hex(prompt.text.as_bytes()));

    // Manifests were synthesized alongside.
    assert!(
        out_dir.join("manifest_hexaco60.jsonl").exists()
            || out_dir.join("manifest_hexaco60.json").exists()
    );
}

#[test]
fn ingest_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = dir.path().join("empty");
    fs::create_dir_all(&dataset).unwrap();
    let output = surveyor(&["ingest", dataset.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn ingest_schema_drift_reports_column_diff() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = dir.path().join("dataset");
    fs::create_dir_all(&dataset).unwrap();
    fs::write(
        dataset.join("hexaco_data.csv"),
        "question,temp,model_name\n1,0.0,engine-a\n",
    )
    .unwrap();
    let output = surveyor(&["ingest", dataset.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let err = stderr_of(&output);
    assert!(err.contains("schema drift"), "{err}");
    assert!(err.contains("response"), "{err}");
    assert!(err.contains("model_name"), "{err}");
}
