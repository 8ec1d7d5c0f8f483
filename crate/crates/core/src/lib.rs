//! Core engine for administering questionnaire instruments to text-completion
//! backends and analyzing the answers.
//!
//! The pipeline stages map onto the modules below:
//!
//! - [`instrument`] — questionnaire definitions and human baseline tables,
//!   loaded from data files and validated.
//! - [`prompt`] — byte-exact prompt rendering (stateless and response-memory
//!   modes) plus a token-estimate guard.
//! - [`backend`] — completion providers (HTTP, scripted, replay) and the
//!   temperature-sweep sampling protocol that produces a raw response log.
//! - [`parse`] — cleaning raw completions into typed answers with NA recoding
//!   and demographic normalization.
//! - [`score`] — pseudo-respondent assembly and composite construct scores.
//! - [`stats`] — descriptives, OLS, logistic regression, multivariate linear
//!   model tests, correlation matrices, and the distribution CDFs behind
//!   their p-values.
//! - [`report`] — paper-style result tables (CSV/Markdown) and the JSON
//!   results bundle.

pub mod backend;
pub mod instrument;
pub mod parse;
pub mod prompt;
pub mod report;
pub mod score;
pub mod stats;
