//! Subcommand implementations. Each one writes its artifacts under `out/<run-id>/` and
//! finishes with the manifest.

use std::path::{Path, PathBuf};

use dirty_bosons::disorder::{FieldSynthesizer, Seed};
use dirty_bosons::fragments::{detect_fragments, FragmentReport, ThresholdPolicy};
use dirty_bosons::meanfield::{
    observables, solve_ground_state, thomas_fermi_profile, EnergyBreakdown, FlowConfig, GpeProblem, GroundState,
    HarmonicTrap, Observables,
};
use dirty_bosons::spectrum::localization::localization_metrics;
use dirty_bosons::spectrum::tail::{dos_tail_fit, HamiltonianTemplate, LevelRecord, TailConfig, MIN_REALIZATIONS};
use dirty_bosons::spectrum::{lowest_eigenpairs, HamiltonianSpec};
use dirty_bosons::{stats, Field, Grid, PhysicalParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{RawConfig, RunConfig, ThresholdChoice};
use crate::error::{HarnessError, Result};
use crate::experiments::{run_verify, VerifyReport, EXPERIMENTS};
use crate::manifest::{OutputDir, TaskState, ToleranceProfile};
use crate::persist::{cell, Table};
use crate::predict::{parameter_grid, require_axes, run_predict};

#[derive(Debug, Clone)]
pub struct CommonArgs {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub profile: ToleranceProfile,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Predict,
    Generate,
    Spectrum,
    Gpe,
    Fragments,
    Verify { experiment: String },
    Sweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Predict => "predict",
            Command::Generate => "generate",
            Command::Spectrum => "spectrum",
            Command::Gpe => "gpe",
            Command::Fragments => "fragments",
            Command::Verify { .. } => "verify",
            Command::Sweep => "sweep",
        }
    }
}

/// Where a run went and, for `verify`, whether it passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub run_dir: PathBuf,
    pub manifest: PathBuf,
    pub passed: Option<bool>,
    pub summary: String,
}

fn load(path: &Option<PathBuf>, command: &str) -> Result<(RunConfig, RawConfig)> {
    let path = path
        .as_ref()
        .ok_or_else(|| HarnessError::Validation(format!("{command}: --config is required")))?;
    RunConfig::from_path(path)
}

fn snapshot(raw: Option<&RawConfig>) -> Result<serde_json::Value> {
    Ok(match raw {
        Some(r) => serde_json::to_value(r)?,
        None => serde_json::Value::Null,
    })
}

pub fn execute(command: &Command, args: &CommonArgs) -> Result<Outcome> {
    let name = command.name();
    if let Command::Verify { experiment } = command {
        if !EXPERIMENTS.contains(&experiment.as_str()) {
            return Err(HarnessError::UnknownExperiment { name: experiment.clone(), valid: EXPERIMENTS.to_vec() });
        }
    }
    let loaded = match (command, &args.config) {
        (Command::Verify { .. }, None) => None,
        _ => Some(load(&args.config, name)?),
    };
    let (config, raw) = match &loaded {
        Some((c, r)) => (Some(c.clone()), Some(r)),
        None => (None, None),
    };
    let stream = args.seed.or(config.as_ref().map(|c| c.ensemble.stream)).unwrap_or(0);
    let label = match command {
        Command::Verify { experiment } => format!("verify-{experiment}"),
        _ => name.to_string(),
    };
    let mut out = OutputDir::create(&args.out, &label, snapshot(raw)?, config.clone(), stream, args.profile)?;
    let mut passed = None;
    let summary = match (command, &config) {
        (Command::Verify { experiment }, c) => {
            let seed = args.seed;
            let report = run_verify(experiment, c.as_ref(), args.profile, seed);
            let report = record(&mut out, experiment, report)?;
            for (i, v) in report.verdicts.iter().enumerate() {
                let state = if v.passed() { TaskState::Pass } else { TaskState::Fail };
                out.task(format!("verdict {i}: {}", v.experiment), state, v.render());
            }
            out.write_report(&report)?;
            passed = Some(report.passed);
            report.verdicts.iter().map(|v| v.render()).collect::<String>()
        }
        (_, None) => unreachable!("configuration loaded for every command but verify"),
        (Command::Predict, Some(c)) => {
            let table = record(&mut out, "predict", run_predict(c))?;
            out.write_table("predict", &table)?;
            out.write_report(&serde_json::json!({ "rows": table.rows.len() }))?;
            format!("{} prediction rows", table.rows.len())
        }
        (Command::Generate, Some(c)) => generate(c, stream, &mut out)?,
        (Command::Spectrum, Some(c)) => spectrum(c, stream, &mut out)?,
        (Command::Gpe, Some(c)) => {
            let run = record(&mut out, "gpe", ground_state(c, &c.params, stream, 0))?;
            out.write_field("density", &run.state.density())?;
            out.write_field("disorder", &run.problem.disorder)?;
            let report = GpeReport::new(&run)?;
            out.write_report(&report)?;
            format!("mu = {:.6e}, residual = {:.2e}", report.chemical_potential, report.residual)
        }
        (Command::Fragments, Some(c)) => {
            let run = record(&mut out, "gpe", ground_state(c, &c.params, stream, 0))?;
            let frags = record(&mut out, "fragments", fragment_run(c, &run))?;
            out.write_field("density", &run.state.density())?;
            out.write_table("fragments", &fragment_table(&frags))?;
            out.write_report(&frags)?;
            format!("{} fragments", frags.len())
        }
        (Command::Sweep, Some(c)) => sweep(c, stream, &mut out)?,
    };
    let run_dir = out.root().to_path_buf();
    let manifest = out.finish()?;
    Ok(Outcome { run_dir, manifest, passed, summary })
}

/// Logs the task in the manifest and passes the result through.
fn record<T>(out: &mut OutputDir, task: &str, result: Result<T>) -> Result<T> {
    match &result {
        Ok(_) => out.task(task, TaskState::Done, ""),
        Err(e) => out.task(task, TaskState::Error, e.to_string()),
    }
    result
}

fn generate(c: &RunConfig, stream: u64, out: &mut OutputDir) -> Result<String> {
    let grid = c.require_grid()?;
    let synth = FieldSynthesizer::new(c.params.disorder, grid)?;
    for w in synth.warnings() {
        log::warn!("{w:?}");
    }
    let fields = (0..c.ensemble.realizations as u64)
        .into_par_iter()
        .map(|r| synth.synthesize(Seed::new(stream, r)).map_err(|e| HarnessError::in_realization(r, e)))
        .collect::<Result<Vec<Field>>>()?;
    let mut table = Table::new(&["realization", "mean", "variance", "min", "max"]);
    for (r, f) in fields.iter().enumerate() {
        out.write_field(&format!("disorder_{r:05}"), f)?;
        table.push(vec![
            r.to_string(),
            cell(Some(f.mean())),
            cell(Some(stats::variance(&f.values))),
            cell(Some(f.min())),
            cell(Some(f.max())),
        ]);
    }
    out.write_table("disorder", &table)?;
    out.task("generate", TaskState::Done, format!("{} realizations", fields.len()));
    out.write_report(&serde_json::json!({ "realizations": fields.len(), "stream": stream }))?;
    Ok(format!("{} disorder realizations", fields.len()))
}

fn level_table(records: &[LevelRecord]) -> Table {
    let mut table = Table::new(&["realization", "level", "energy", "residual", "ipr", "rms_radius"]);
    for r in records {
        table.push(vec![
            r.realization.to_string(),
            r.level.to_string(),
            cell(Some(r.energy)),
            cell(Some(r.residual)),
            cell(r.ipr),
            cell(r.rms_radius),
        ]);
    }
    table
}

/// Lowest levels of every realization; with enough realizations the tail fit as well.
fn spectrum(c: &RunConfig, stream: u64, out: &mut OutputDir) -> Result<String> {
    let grid = c.require_grid()?;
    if c.ensemble.realizations >= MIN_REALIZATIONS {
        let template = HamiltonianTemplate { grid: grid.clone(), mass: 1.0, hbar: 1.0 };
        let config = TailConfig {
            realizations: c.ensemble.realizations,
            levels: c.ensemble.levels,
            stream,
            record_modes: true,
            ..TailConfig::default()
        };
        let (fit, records) = record(out, "spectrum", dos_tail_fit(&template, &c.params.disorder, &config).map_err(Into::into))?;
        out.write_table("levels", &level_table(&records))?;
        let mut idos = Table::new(&["energy", "idos"]);
        for (e, n) in &fit.idos {
            idos.push(vec![cell(Some(*e)), cell(Some(*n))]);
        }
        out.write_table("idos", &idos)?;
        out.write_report(&fit)?;
        return Ok(format!("tail exponent {:.4} in {:?}", fit.exponent, fit.exponent_interval));
    }
    let synth = FieldSynthesizer::new(c.params.disorder, grid)?;
    let records = (0..c.ensemble.realizations as u64)
        .into_par_iter()
        .map(|r| -> Result<Vec<LevelRecord>> {
            let potential = synth.synthesize(Seed::new(stream, r))?;
            let spec = HamiltonianSpec::new(potential, 1.0, 1.0)?;
            let set = lowest_eigenpairs(&spec, c.ensemble.levels, 1e-8).map_err(|e| HarnessError::in_realization(r, e))?;
            set.energies
                .iter()
                .zip(&set.residuals)
                .zip(&set.modes)
                .enumerate()
                .map(|(level, ((&energy, &residual), mode))| {
                    let m = localization_metrics(mode)?;
                    Ok(LevelRecord {
                        realization: r,
                        level,
                        energy,
                        residual,
                        ipr: Some(m.ipr),
                        rms_radius: Some(m.rms_radius),
                        centroid: Some(m.centroid),
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>();
    let records: Vec<LevelRecord> = record(out, "spectrum", records)?.into_iter().flatten().collect();
    out.write_table("levels", &level_table(&records))?;
    out.write_report(&records)?;
    Ok(format!("{} levels", records.len()))
}

pub struct GpeRun {
    pub problem: GpeProblem,
    pub state: GroundState,
}

/// Ground state in disorder realization `realization` of `stream`, with the trap and
/// amount of gas from `params`.
pub fn ground_state(c: &RunConfig, params: &PhysicalParams, stream: u64, realization: u64) -> Result<GpeRun> {
    let grid: &Grid = c.require_grid()?;
    let disorder = FieldSynthesizer::new(params.disorder, grid)?
        .synthesize(Seed::new(stream, realization))
        .map_err(|e| HarnessError::in_realization(realization, e))?;
    let count = c
        .gpe
        .particle_count
        .or(params.particle_count)
        .or(params.mean_density.map(|n| n * grid.volume()))
        .ok_or_else(|| {
            HarnessError::Validation("gpe.particle_count: set it, physics.particle_count or physics.mean_density".into())
        })?;
    let problem = GpeProblem {
        disorder,
        trap: params.trap_frequency.map(HarmonicTrap::centered),
        coupling: params.coupling().map_err(|_| HarnessError::Validation("physics: a coupling is required".into()))?,
        particle_count: count,
        mass: 1.0,
        hbar: 1.0,
    };
    let mut flow = FlowConfig { starts: c.gpe.starts, seed: stream ^ realization.rotate_left(32), ..FlowConfig::default() };
    if let Some(tol) = c.gpe.residual_tol {
        flow.residual_tol = tol;
    }
    let state = solve_ground_state(&problem, &flow).map_err(|e| HarnessError::in_realization(realization, e))?;
    Ok(GpeRun { problem, state })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpeReport {
    pub particle_count: f64,
    pub chemical_potential: f64,
    pub energy: EnergyBreakdown,
    pub residual: f64,
    pub iterations: usize,
    pub start_energy_spread: f64,
    pub observables: Observables,
    pub thomas_fermi_chemical_potential: Option<f64>,
}

impl GpeReport {
    pub fn new(run: &GpeRun) -> Result<Self> {
        let tf = match (&run.problem.trap, run.problem.coupling > 0.0) {
            (Some(_), true) => Some(thomas_fermi_profile(&run.problem)?.chemical_potential),
            _ => None,
        };
        Ok(Self {
            particle_count: run.problem.particle_count,
            chemical_potential: run.state.chemical_potential,
            energy: run.state.energy,
            residual: run.state.residual,
            iterations: run.state.iterations,
            start_energy_spread: run.state.start_energy_spread,
            observables: observables(&run.state.psi, &run.problem)?,
            thomas_fermi_chemical_potential: tf,
        })
    }
}

pub fn threshold_policy(choice: ThresholdChoice, mu: f64, g: f64) -> ThresholdPolicy {
    match choice {
        ThresholdChoice::Relative { epsilon } => ThresholdPolicy::Relative(epsilon),
        ThresholdChoice::Absolute { level } => ThresholdPolicy::Absolute(level),
        ThresholdChoice::MuLevel { epsilon } => ThresholdPolicy::MuLevel { mu, g, epsilon },
    }
}

pub fn fragment_run(c: &RunConfig, run: &GpeRun) -> Result<FragmentReport> {
    let mu = run.state.chemical_potential;
    let policy = threshold_policy(c.threshold, mu, run.problem.coupling);
    let report = detect_fragments(&run.state.density(), policy)?;
    Ok(report.with_tunneling(run.problem.grid(), &run.problem.external_potential(), mu, 1.0, 1.0))
}

fn fragment_table(report: &FragmentReport) -> Table {
    let mut table = Table::new(&["id", "particle_count", "rms_radius", "peak_density", "cells", "percolating", "centroid"]);
    for f in &report.fragments {
        table.push(vec![
            f.id.to_string(),
            cell(Some(f.particle_count)),
            cell(Some(f.rms_radius)),
            cell(Some(f.peak_density)),
            f.cells.to_string(),
            f.percolating.to_string(),
            f.centroid.iter().map(|x| cell(Some(*x))).collect::<Vec<_>>().join(";"),
        ]);
    }
    table
}

/// Analytic table plus one ground state and fragment analysis per grid point and
/// realization. Realizations share disorder seeds across points.
fn sweep(c: &RunConfig, stream: u64, out: &mut OutputDir) -> Result<String> {
    require_axes(c)?;
    c.require_grid()?;
    let analytic = record(out, "predict", run_predict(c))?;
    out.write_table("predict", &analytic)?;
    let points = parameter_grid(&c.params, &c.sweep)?;
    let tasks: Vec<(usize, u64)> =
        (0..points.len()).flat_map(|p| (0..c.ensemble.realizations as u64).map(move |r| (p, r))).collect();
    let rows = tasks
        .par_iter()
        .map(|&(p, r)| -> Result<Vec<String>> {
            let run = ground_state(c, &points[p].params, stream, r)?;
            let frags = fragment_run(c, &run)?;
            let mut row: Vec<String> = points[p].values.iter().map(|v| cell(Some(*v))).collect();
            row.extend([
                r.to_string(),
                cell(Some(run.problem.particle_count)),
                cell(Some(run.state.chemical_potential)),
                cell(Some(run.state.energy.total() / run.problem.particle_count)),
                cell(Some(run.state.residual)),
                frags.len().to_string(),
                cell(frags.median_rms_radius()),
                cell(frags.spacing.map(|s| s.median)),
                frags.single_percolating().to_string(),
            ]);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>();
    let rows = record(out, "ensemble", rows)?;
    let mut headers: Vec<&str> = c.sweep.iter().map(|a| a.parameter.name()).collect();
    headers.extend([
        "realization",
        "particle_count",
        "chemical_potential",
        "energy_per_particle",
        "residual",
        "fragments",
        "median_rms_radius",
        "median_spacing",
        "single_percolating",
    ]);
    let mut table = Table::new(&headers);
    rows.into_iter().for_each(|r| table.push(r));
    out.write_table("sweep", &table)?;
    out.write_report(&serde_json::json!({ "points": points.len(), "realizations": c.ensemble.realizations }))?;
    Ok(format!("{} points x {} realizations", points.len(), c.ensemble.realizations))
}

/// Verify report of a finished run directory.
pub fn load_verify_report(run_dir: &Path) -> Result<VerifyReport> {
    crate::persist::load_report(&run_dir.join("report.json"))
}
