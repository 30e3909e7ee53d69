//! Orchestration layer for `dirty_bosons`: unit-tagged configuration, seeded ensemble
//! runs, persistence of fields and reports, acceptance experiments and the `dbosons` CLI.

pub mod commands;
pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod persist;
pub mod predict;
pub mod units;

pub use config::RunConfig;
pub use error::{HarnessError, Result};
pub use manifest::{OutputDir, RunManifest};
