//! Pipeline driver: validate, run, ingest, parse, score, analyze, report.
//!
//! Every stage reads and writes files, so each intermediate is inspectable.
//! Logs go to standard error; data goes to files only. Exit codes: 0 success,
//! 1 user/config error, 2 backend/runtime failure, 3 partial completion.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use surveyor_cli::commands;

#[derive(Debug, Parser)]
#[command(
    name = "surveyor",
    version,
    about = "Questionnaire runs against completion backends: sampling, cleaning, scoring, and analysis"
)]
struct Cli {
    /// Directory for written artifacts (default: current directory).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Override the run seed from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Render prompts and estimate request sizes without sending anything.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Chattier progress logging on stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an instrument definition and print its summary.
    Validate {
        /// Path to a definition file, or a bundled id (hexaco60, hvs21, demographics).
        instrument: String,
    },
    /// Execute a sampling run described by a TOML config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Convert an externally published dataset directory into canonical raw logs.
    Ingest { dataset: PathBuf },
    /// Clean a raw response log into typed answers.
    Parse {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        instrument: String,
        /// Optional gender normalization rules file (default: bundled).
        #[arg(long)]
        gender_map: Option<PathBuf>,
    },
    /// Assemble pseudo-respondents and composite scores from cleaned answers.
    Score {
        #[arg(long)]
        cleaned: PathBuf,
        #[arg(long)]
        instrument: String,
        /// stateless or memory.
        #[arg(long, default_value = "stateless")]
        mode: String,
    },
    /// Run the statistical battery and write the results bundle plus tables.
    Analyze {
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long)]
        demographics: Option<PathBuf>,
        /// Manifest whose hash stamps the results bundle.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Baseline tables: bundled id (hexaco, hvs) or a path.
        #[arg(long)]
        baselines: Option<String>,
        /// Reference correlation matrix: bundled id (hexaco, hvs) or a path.
        #[arg(long)]
        reference_correlations: Option<String>,
    },
    /// Regenerate result tables from a profiles file.
    Report {
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        baselines: Option<String>,
        #[arg(long)]
        reference_correlations: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context {
        out_dir: cli.out_dir.unwrap_or_else(|| PathBuf::from(".")),
        seed_override: cli.seed,
        dry_run: cli.dry_run,
        verbose: cli.verbose,
    };
    let outcome = match cli.command {
        Command::Validate { instrument } => commands::cmd_validate(&ctx, &instrument),
        Command::Run { config } => commands::cmd_run(&ctx, &config),
        Command::Ingest { dataset } => commands::cmd_ingest(&ctx, &dataset),
        Command::Parse {
            log,
            instrument,
            gender_map,
        } => commands::cmd_parse(&ctx, &log, &instrument, gender_map.as_deref()),
        Command::Score {
            cleaned,
            instrument,
            mode,
        } => commands::cmd_score(&ctx, &cleaned, &instrument, &mode),
        Command::Analyze {
            profiles,
            demographics,
            manifest,
            baselines,
            reference_correlations,
        } => commands::cmd_analyze(
            &ctx,
            profiles.as_deref(),
            demographics.as_deref(),
            manifest.as_deref(),
            baselines.as_deref(),
            reference_correlations.as_deref(),
        ),
        Command::Report {
            profiles,
            baselines,
            reference_correlations,
        } => commands::cmd_report(
            &ctx,
            &profiles,
            baselines.as_deref(),
            reference_correlations.as_deref(),
        ),
    };
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    if ctx.verbose {
        for path in &outcome.artifact_paths {
            eprintln!("artifact: {}", path.display());
        }
    }
    ExitCode::from(outcome.exit_code)
}
