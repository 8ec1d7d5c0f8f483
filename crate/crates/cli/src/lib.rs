//! Library surface of the pipeline driver, shared by the `surveyor` binary
//! and the integration test suites.

pub mod commands;
pub mod ingest;
