//! Output directory layout and the run manifest, written last and atomically.
//!
//! ```text
//! out/<run-id>/manifest.json
//! out/<run-id>/report.json
//! out/<run-id>/tables/*.csv
//! out/<run-id>/fields/*.bin + *.json
//! ```

use std::fs;
use std::hash::Hasher;
use std::path::{Path, PathBuf};
use std::time::Instant;

use dirty_bosons::analytic::PrefactorMode;
use dirty_bosons::scales::{OMEGA_1, OMEGA_2, OMEGA_3};
use dirty_bosons::Field;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::persist::{save_field, save_report, write_atomic, Table};
use crate::units::UnitSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceProfile {
    /// Full-size ensembles and the tolerances of the acceptance criteria.
    #[default]
    Strict,
    /// Smaller ensembles for quick checks on a laptop.
    Desk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub energy: String,
    pub coupling: String,
    pub prefactor: PrefactorMode,
    /// Unit-ball volumes for `d = 1, 2, 3`.
    pub omega_d: [f64; 3],
}

impl Conventions {
    pub fn new(prefactor: PrefactorMode) -> Self {
        Self {
            energy: "E_d = hbar^2/(2 m L_d^2); kinetic energy p^2/(2m)".into(),
            coupling: "g_3 = 4 pi hbar^2 a/m, g_1 = 2 hbar^2/(m a_1), g_2 given explicitly".into(),
            prefactor,
            omega_d: [OMEGA_1, OMEGA_2, OMEGA_3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalUnits {
    pub length_m: f64,
    pub mass_kg: f64,
    pub time_s: f64,
    pub energy_j: f64,
}

impl From<UnitSystem> for NaturalUnits {
    fn from(u: UnitSystem) -> Self {
        Self { length_m: u.length_si, mass_kg: u.mass_si, time_s: u.time_si(), energy_j: u.energy_si() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskState {
    Done,
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskStatus {
    pub name: String,
    pub state: TaskState,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub subcommand: String,
    pub version: String,
    pub seed: u64,
    pub tolerance_profile: ToleranceProfile,
    /// The configuration file as read, and its resolved natural-unit form.
    pub config_raw: serde_json::Value,
    pub config: Option<RunConfig>,
    pub units: NaturalUnits,
    pub conventions: Conventions,
    pub tasks: Vec<TaskStatus>,
    /// Paths relative to the run directory, in creation order.
    pub artifacts: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::CorruptHeader(format!("{}: {e}", path.display())))
    }

    /// The manifest with wall-clock time zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self { wall_clock_seconds: 0.0, ..self.clone() }
    }
}

/// Stable identifier of a run: FNV-1a over subcommand, configuration, seed and profile.
pub fn run_id(subcommand: &str, config_raw: &serde_json::Value, seed: u64, profile: ToleranceProfile) -> String {
    let mut h = fnv::FnvHasher::default();
    h.write(subcommand.as_bytes());
    h.write(&[0]);
    h.write(config_raw.to_string().as_bytes());
    h.write(&seed.to_le_bytes());
    h.write(&[profile as u8]);
    format!("{subcommand}-{:016x}", h.finish())
}

/// A run directory that records every artifact and writes the manifest when finished.
pub struct OutputDir {
    root: PathBuf,
    manifest: RunManifest,
    started: Instant,
}

impl OutputDir {
    pub fn create(
        out: &Path,
        subcommand: &str,
        config_raw: serde_json::Value,
        config: Option<RunConfig>,
        seed: u64,
        profile: ToleranceProfile,
    ) -> Result<Self> {
        let id = run_id(subcommand, &config_raw, seed, profile);
        let root = out.join(&id);
        fs::create_dir_all(&root).map_err(|e| HarnessError::io(&root, e))?;
        // a stale manifest from an earlier run must not describe this one
        let stale = root.join("manifest.json");
        if stale.exists() {
            fs::remove_file(&stale).map_err(|e| HarnessError::io(&stale, e))?;
        }
        let units = config.as_ref().map(|c| c.units).unwrap_or_default().into();
        let prefactor = config.as_ref().map(|c| c.prefactor).unwrap_or_default();
        Ok(Self {
            root,
            manifest: RunManifest {
                run_id: id,
                subcommand: subcommand.into(),
                version: env!("CARGO_PKG_VERSION").into(),
                seed,
                tolerance_profile: profile,
                config_raw,
                config,
                units,
                conventions: Conventions::new(prefactor),
                tasks: Vec::new(),
                artifacts: Vec::new(),
                wall_clock_seconds: 0.0,
            },
            started: Instant::now(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn record(&mut self, relative: String) {
        if !self.manifest.artifacts.contains(&relative) {
            self.manifest.artifacts.push(relative);
        }
    }

    pub fn write_table(&mut self, name: &str, table: &Table) -> Result<PathBuf> {
        let rel = format!("tables/{name}.csv");
        let path = self.root.join(&rel);
        write_atomic(&path, table.to_csv().as_bytes())?;
        self.record(rel);
        Ok(path)
    }

    pub fn write_field(&mut self, name: &str, field: &Field) -> Result<PathBuf> {
        let base = self.root.join("fields").join(name);
        save_field(field, &base)?;
        self.record(format!("fields/{name}.bin"));
        self.record(format!("fields/{name}.json"));
        Ok(base)
    }

    pub fn write_report<T: Serialize>(&mut self, report: &T) -> Result<PathBuf> {
        let path = self.root.join("report.json");
        save_report(report, &path)?;
        self.record("report.json".into());
        Ok(path)
    }

    pub fn task(&mut self, name: impl Into<String>, state: TaskState, detail: impl Into<String>) {
        self.manifest.tasks.push(TaskStatus { name: name.into(), state, detail: detail.into() });
    }

    /// Writes `manifest.json` last; returns its path.
    pub fn finish(mut self) -> Result<PathBuf> {
        self.manifest.wall_clock_seconds = self.started.elapsed().as_secs_f64();
        let path = self.root.join("manifest.json");
        write_atomic(&path, serde_json::to_string_pretty(&self.manifest)?.as_bytes())?;
        Ok(path)
    }
}
