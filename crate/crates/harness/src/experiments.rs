//! Acceptance experiments. Each runner returns a [`Verdict`] made of named checks with
//! the measured value and the target it was held against.

use std::f64::consts::PI;

use dirty_bosons::analytic::{
    filled_state_uncorrelated, luttinger_parameter, relaxation_time, renormalized_disorder,
    well_statistics_uncorrelated, PrefactorMode,
};
use dirty_bosons::disorder::{lattice_covariance, measure_correlator, FieldSynthesizer, Seed};
use dirty_bosons::fragments::{detect_fragments, fragmentation_scaling, ScalingConfig, ScalingReport, SweepPoint, ThresholdPolicy};
use dirty_bosons::meanfield::{solve_ground_state, thomas_fermi_profile, FlowConfig, GpeProblem, HarmonicTrap};
use dirty_bosons::scales::{
    critical_density_three_dim, critical_density_uncorrelated, reduced_dimension_map, DisorderClass,
};
use dirty_bosons::spectrum::tail::{dos_tail_fit, DosTailFit, HamiltonianTemplate, LevelRecord, TailConfig};
use dirty_bosons::spectrum::{dense_eigenvalues, lowest_eigenpairs, HamiltonianSpec};
use dirty_bosons::{derive_scales, stats, DisorderSpec, Field, Grid, PhysicalParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::manifest::ToleranceProfile;
use crate::units::UnitSystem;

/// Experiments reachable through `verify`.
pub const EXPERIMENTS: [&str; 3] = ["dos_tail", "fragmentation", "correlator"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub target: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, measured: f64, target: impl Into<String>) -> Self {
        Self { name: name.into(), passed, measured, target: target.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub experiment: String,
    pub checks: Vec<Check>,
    pub details: serde_json::Value,
}

impl Verdict {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self { experiment: experiment.into(), checks: Vec::new(), details: serde_json::Value::Null }
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// One line per verdict followed by an indented line per check.
    pub fn render(&self) -> String {
        let mut out = format!("{} {}\n", if self.passed() { "PASS" } else { "FAIL" }, self.experiment);
        for c in &self.checks {
            out.push_str(&format!(
                "    [{}] {}: {:.6e} (target {})\n",
                if c.passed { "ok" } else { "xx" },
                c.name,
                c.measured,
                c.target
            ));
        }
        out
    }
}

fn natural(d: usize, disorder: DisorderSpec) -> PhysicalParams {
    PhysicalParams::natural(d, disorder)
}

// ---------------------------------------------------------------------------------------
// Density of states tails

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSettings {
    pub disorder: DisorderSpec,
    pub sites: usize,
    pub spacing: f64,
    pub realizations: usize,
    pub levels: usize,
    pub stream: u64,
    pub record_modes: bool,
    pub expected_exponent: f64,
    pub tolerance: f64,
}

impl TailSettings {
    /// Delta-correlated chain, `κ = 1` so that `L_1 = 1`; 2048 sites of `L_1/16`.
    pub fn uncorrelated(profile: ToleranceProfile) -> Self {
        Self {
            disorder: DisorderSpec::Uncorrelated { kappa: 1.0 },
            sites: 2048,
            spacing: 0.0625,
            realizations: match profile {
                ToleranceProfile::Strict => 2000,
                ToleranceProfile::Desk => 400,
            },
            levels: 20,
            stream: 11,
            record_modes: true,
            expected_exponent: 1.5,
            tolerance: 0.2,
        }
    }

    /// Gaussian-correlated chain with `U0 = 1` and `b = 8h`, far above `B = ħ/√(mU0) = 1`.
    pub fn gaussian(profile: ToleranceProfile) -> Self {
        Self {
            disorder: DisorderSpec::GaussianCorrelated { u0: 1.0, b: 8.0 },
            sites: 2048,
            spacing: 1.0,
            realizations: match profile {
                ToleranceProfile::Strict => 2000,
                ToleranceProfile::Desk => 400,
            },
            levels: 20,
            stream: 12,
            record_modes: false,
            expected_exponent: 2.0,
            tolerance: 0.3,
        }
    }

    /// Settings for a configured disorder: the expected exponent is `(4 − d)/2` for
    /// short-range disorder and 2 for strongly correlated disorder.
    pub fn from_config(config: &RunConfig, profile: ToleranceProfile) -> Result<Self> {
        let grid = config.require_grid()?;
        if grid.dimension() != 1 {
            return Err(HarnessError::Validation("verify dos_tail: only one-dimensional grids are supported".into()));
        }
        let scales = derive_scales(&config.params)?;
        let strongly = scales.disorder_class == DisorderClass::StronglyCorrelated;
        let base = if strongly { Self::gaussian(profile) } else { Self::uncorrelated(profile) };
        Ok(Self {
            disorder: config.params.disorder,
            sites: grid.shape[0],
            spacing: grid.spacing[0],
            realizations: config.ensemble.realizations,
            levels: config.ensemble.levels,
            stream: config.ensemble.stream,
            expected_exponent: if strongly { 2.0 } else { 1.5 },
            ..base
        })
    }
}

pub struct TailOutcome {
    pub verdict: Verdict,
    pub fit: DosTailFit,
    pub records: Vec<LevelRecord>,
}

pub fn dos_tail(settings: &TailSettings) -> Result<TailOutcome> {
    let grid = Grid::new(vec![settings.sites], vec![settings.spacing])?;
    let template = HamiltonianTemplate { grid, mass: 1.0, hbar: 1.0 };
    let config = TailConfig {
        realizations: settings.realizations,
        levels: settings.levels,
        stream: settings.stream,
        record_modes: settings.record_modes,
        ..TailConfig::default()
    };
    let (fit, records) = dos_tail_fit(&template, &settings.disorder, &config)?;
    let mut verdict = Verdict::new(format!("dos_tail ({})", settings.disorder.name()));
    let off = (fit.exponent - settings.expected_exponent).abs();
    verdict.push(Check::new(
        "tail exponent p",
        off <= settings.tolerance,
        fit.exponent,
        format!("{} ± {}", settings.expected_exponent, settings.tolerance),
    ));
    verdict.details = serde_json::json!({
        "exponent_interval": fit.exponent_interval,
        "window": fit.window,
        "reduced_chi2": fit.reduced_chi2,
        "levels_in_window": fit.levels_in_window,
        "realizations": fit.realizations,
    });
    Ok(TailOutcome { verdict, fit, records })
}

/// Rank correlation between the depth of each realization's ground level and the
/// inverse size of its mode, with the power-law slope of size against depth.
pub fn deep_state_geometry(records: &[LevelRecord]) -> Result<Verdict> {
    let ground: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.level == 0 && r.energy < 0.0)
        .filter_map(|r| r.rms_radius.map(|radius| (r.energy.abs().ln(), radius.ln())))
        .collect();
    if ground.len() < 10 {
        return Err(HarnessError::Validation(format!(
            "deep-state geometry needs mode records of at least 10 negative ground levels, got {}",
            ground.len()
        )));
    }
    let log_e: Vec<f64> = ground.iter().map(|g| g.0).collect();
    let neg_log_r: Vec<f64> = ground.iter().map(|g| -g.1).collect();
    let log_r: Vec<f64> = ground.iter().map(|g| g.1).collect();
    let rank = stats::spearman(&log_e, &neg_log_r);
    let fit = stats::linear_fit(&log_e, &log_r)
        .ok_or_else(|| HarnessError::Validation("deep-state geometry: degenerate energies".into()))?;
    let mut v = Verdict::new("deep-state geometry");
    v.push(Check::new("spearman rho", rank.rho > 0.0 && rank.p_positive < 0.01, rank.rho, "> 0 at 99% confidence"));
    v.push(Check::new(
        "slope d ln R / d ln|E|",
        (fit.slope / -0.5 - 1.0).abs() <= 0.3,
        fit.slope,
        "-0.5 within 30%",
    ));
    v.details = serde_json::json!({ "p_positive": rank.p_positive, "n": rank.n, "slope_error": fit.slope_error });
    Ok(v)
}

// ---------------------------------------------------------------------------------------
// Correlator fidelity

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSettings {
    pub specs: Vec<DisorderSpec>,
    pub sites: usize,
    pub spacing: f64,
    pub realizations: usize,
    pub stream: u64,
    pub sigmas: f64,
}

impl CorrelatorSettings {
    /// All four disorder kinds on a chain of 4096 sites with `b = 8h`.
    pub fn all_kinds(profile: ToleranceProfile) -> Self {
        let b = 2.0;
        Self {
            specs: vec![
                DisorderSpec::Uncorrelated { kappa: 1.0 },
                DisorderSpec::OrnsteinZernike { kappa: 1.0, b },
                DisorderSpec::GaussianCorrelated { u0: 1.0, b },
                DisorderSpec::LorentzCorrelated { u0: 1.0, b },
            ],
            sites: 4096,
            spacing: 0.25,
            realizations: match profile {
                ToleranceProfile::Strict => 200,
                ToleranceProfile::Desk => 200,
            },
            stream: 13,
            sigmas: 3.0,
        }
    }

    pub fn from_config(config: &RunConfig, profile: ToleranceProfile) -> Result<Self> {
        let grid = config.require_grid()?;
        if grid.dimension() != 1 {
            return Err(HarnessError::Validation("verify correlator: only one-dimensional grids are supported".into()));
        }
        Ok(Self {
            specs: vec![config.params.disorder],
            sites: grid.shape[0],
            spacing: grid.spacing[0],
            realizations: config.ensemble.realizations,
            stream: config.ensemble.stream,
            ..Self::all_kinds(profile)
        })
    }
}

/// Measured `K(r)` against the exact covariance of the synthesized ensemble at
/// `r = 0, b, 2b` (`b = 4h` for delta-correlated disorder). For Gaussian disorder the
/// ratio `K(b)/K(0)` is also held against the continuum value `e^{-1/2}`.
pub fn correlator_fidelity(settings: &CorrelatorSettings) -> Result<Verdict> {
    if settings.realizations < 200 {
        log::warn!("correlator fidelity with {} realizations; the criterion asks for 200", settings.realizations);
    }
    let grid = Grid::new(vec![settings.sites], vec![settings.spacing])?;
    let mut v = Verdict::new("correlator");
    let mut details = Vec::new();
    for spec in &settings.specs {
        let b_lag = match spec.correlation_length() {
            Some(b) => (b / settings.spacing).round() as usize,
            None => 4,
        };
        if 2 * b_lag >= settings.sites / 2 {
            return Err(HarnessError::Validation(format!("correlator: 2b exceeds half the box for {}", spec.name())));
        }
        let synth = FieldSynthesizer::new(*spec, &grid)?;
        let fields = (0..settings.realizations as u64)
            .into_par_iter()
            .map(|r| synth.synthesize(Seed::new(settings.stream, r)).map_err(|e| HarnessError::in_realization(r, e)))
            .collect::<Result<Vec<Field>>>()?;
        let est = measure_correlator(&fields, 2 * b_lag)?;
        let exact = lattice_covariance(spec, &grid)?;
        for (label, lag) in [("0", 0), ("b", b_lag), ("2b", 2 * b_lag)] {
            let target = exact.values[lag];
            let (value, se) = (est.values[lag], est.standard_errors[lag]);
            let z = (value - target).abs() / se;
            v.push(Check::new(
                format!("{} K({label}) deviation in standard errors", spec.name()),
                z <= settings.sigmas,
                z,
                format!("<= {} (target {target:.6e}, measured {value:.6e} ± {se:.2e})", settings.sigmas),
            ));
        }
        if let DisorderSpec::GaussianCorrelated { .. } = spec {
            let (ratio, se) = est.ratio(b_lag, 0);
            let target = (-0.5f64).exp();
            let z = (ratio - target).abs() / se;
            v.push(Check::new(
                "gaussian K(b)/K(0) against exp(-1/2), in standard errors",
                z <= settings.sigmas,
                z,
                format!("<= {} (ratio {ratio:.6} ± {se:.2e})", settings.sigmas),
            ));
        }
        details.push(serde_json::json!({
            "disorder": spec,
            "lags": est.lags,
            "measured": est.values,
            "standard_errors": est.standard_errors,
            "lattice_target": exact.values[..=2 * b_lag].to_vec(),
        }));
    }
    v.details = serde_json::Value::Array(details);
    Ok(v)
}

// ---------------------------------------------------------------------------------------
// Eigensolver oracle

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    pub instances: usize,
    pub levels: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self { instances: 50, levels: 5, seed: 14, tolerance: 1e-8 }
    }
}

fn random_instance(rng: &mut ChaCha8Rng) -> Result<HamiltonianSpec> {
    let d = rng.random_range(1..=3usize);
    let side = match d {
        1 => rng.random_range(64..=512usize),
        2 => rng.random_range(8..=22usize),
        _ => rng.random_range(8..=10usize),
    };
    let h = rng.random_range(0.5..1.5);
    let periodic: Vec<bool> = (0..d).map(|_| rng.random_bool(0.5)).collect();
    let grid = Grid::with_boundaries(vec![side; d], vec![h; d], periodic)?;
    let w = rng.random_range(0.5..4.0);
    let values = (0..grid.len()).map(|_| rng.random_range(-w..w)).collect();
    Ok(HamiltonianSpec::new(Field::new(grid, values)?, 1.0, 1.0)?)
}

/// Lowest levels of random Hamiltonians from the iterative solver against dense
/// diagonalization. Errors are relative to `max(|E|, ħ²/(2mh²))` so that levels near
/// zero are judged on the scale of the hopping.
pub fn eigensolver_oracle(settings: &OracleSettings) -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let specs: Vec<HamiltonianSpec> = (0..settings.instances).map(|_| random_instance(&mut rng)).collect::<Result<_>>()?;
    let worst: Vec<f64> = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| -> Result<f64> {
            let dense = dense_eigenvalues(spec)?;
            let set = lowest_eigenpairs(spec, settings.levels, 1e-10).map_err(|e| HarnessError::in_realization(i as u64, e))?;
            let scale = spec.hopping().into_iter().fold(0.0, f64::max);
            Ok(set
                .energies
                .iter()
                .zip(&dense)
                .map(|(e, d)| (e - d).abs() / d.abs().max(scale))
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let max = worst.iter().copied().fold(0.0, f64::max);
    let mut v = Verdict::new("eigensolver oracle");
    v.push(Check::new(
        format!("largest relative deviation over {} instances", settings.instances),
        max <= settings.tolerance,
        max,
        format!("<= {:e}", settings.tolerance),
    ));
    v.details = serde_json::json!({ "per_instance": worst });
    Ok(v)
}

// ---------------------------------------------------------------------------------------
// Mean-field oracles

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpeOracleSettings {
    /// Dimensions of the clean-trap check, each at 256 points per axis.
    pub harmonic_dimensions: Vec<usize>,
    pub harmonic_points: usize,
    pub harmonic_half_width: f64,
    pub scattering_length: f64,
    pub particle_count: f64,
    pub tf_points: usize,
    pub tf_half_width: f64,
}

impl GpeOracleSettings {
    pub fn new(profile: ToleranceProfile) -> Self {
        Self {
            harmonic_dimensions: match profile {
                ToleranceProfile::Strict => vec![1, 2],
                ToleranceProfile::Desk => vec![1],
            },
            harmonic_points: 256,
            harmonic_half_width: 8.0,
            scattering_length: 0.01,
            // 3Na = 100.02 oscillator lengths
            particle_count: 3334.0,
            tf_points: 40,
            tf_half_width: 5.0,
        }
    }
}

pub fn gpe_oracles(settings: &GpeOracleSettings) -> Result<Verdict> {
    let mut v = Verdict::new("gpe oracles");
    let history = FlowConfig { record_history: true, ..FlowConfig::default() };
    let mut rises = 0usize;
    let mut steps = 0usize;
    let mut count_rises = |h: &[f64]| {
        steps += h.len().saturating_sub(1);
        rises += h.windows(2).filter(|w| w[1] > w[0]).count();
    };
    for &d in &settings.harmonic_dimensions {
        let h = 2.0 * settings.harmonic_half_width / settings.harmonic_points as f64;
        let grid = Grid::cubic(d, settings.harmonic_points, h)?;
        let problem = GpeProblem {
            disorder: Field::zeros(&grid),
            trap: Some(HarmonicTrap::centered(1.0)),
            coupling: 0.0,
            particle_count: 1.0,
            mass: 1.0,
            hbar: 1.0,
        };
        let state = solve_ground_state(&problem, &FlowConfig { starts: 1, ..history })?;
        count_rises(&state.energy_history);
        let e = state.energy.total() / problem.particle_count;
        let target = d as f64 / 2.0;
        v.push(Check::new(
            format!("d={d} trap-only energy per particle"),
            (e / target - 1.0).abs() <= 0.01,
            e,
            format!("{target} within 1%"),
        ));
    }

    let grid = Grid::cubic(3, settings.tf_points, 2.0 * settings.tf_half_width / settings.tf_points as f64)?;
    let g = 4.0 * PI * settings.scattering_length;
    let problem = GpeProblem {
        disorder: Field::zeros(&grid),
        trap: Some(HarmonicTrap::centered(1.0)),
        coupling: g,
        particle_count: settings.particle_count,
        mass: 1.0,
        hbar: 1.0,
    };
    let state = solve_ground_state(&problem, &FlowConfig { starts: 1, ..history })?;
    count_rises(&state.energy_history);
    let tf = thomas_fermi_profile(&problem)?;
    // exact Thomas-Fermi integral of a spherical trap, ω = 1: μ = ½(15Na)^{2/5}
    let closed_mu = 0.5 * (15.0 * settings.particle_count * settings.scattering_length).powf(0.4);
    let estimate_mu = 0.5 * tf.radius * tf.radius;
    let mu = state.chemical_potential;
    let three_na = 3.0 * settings.particle_count * settings.scattering_length;
    v.push(Check::new(
        format!("GPE mu against grid Thomas-Fermi mu at 3Na = {three_na:.2}"),
        (mu / tf.chemical_potential - 1.0).abs() <= 0.1,
        mu,
        format!("{:.6} within 10%", tf.chemical_potential),
    ));
    v.push(Check::new(
        "GPE mu against closed-form Thomas-Fermi mu",
        (mu / closed_mu - 1.0).abs() <= 0.1,
        mu,
        format!("{closed_mu:.6} within 10%"),
    ));
    v.push(Check::new(
        "energy rises over accepted steps",
        rises == 0,
        rises as f64,
        format!("0 over {steps} steps"),
    ));
    v.details = serde_json::json!({
        "tf_residual": state.residual,
        "tf_iterations": state.iterations,
        "tf_radius": tf.radius,
        "tf_radius_from_mu": tf.radius_from_mu,
        "scaling_estimate_mu": estimate_mu,
        "mu_over_scaling_estimate": mu / estimate_mu,
    });
    Ok(v)
}

// ---------------------------------------------------------------------------------------
// Fragmentation trends

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentationSettings {
    pub disorder: DisorderSpec,
    pub coupling: f64,
    pub sites: usize,
    pub spacing: f64,
    /// Densities as fractions of `n_c`.
    pub fractions: Vec<f64>,
    pub seeds: usize,
    pub stream: u64,
    pub epsilon: f64,
    pub starts: usize,
}

impl FragmentationSettings {
    /// `κ = g = 1` on a 128 `L_1` ring; six densities over a decade below `n_c/e`
    /// plus `n_c` and `2n_c`.
    pub fn new(profile: ToleranceProfile) -> Self {
        let below = [0.03, 0.045, 0.07, 0.1, 0.15, 0.3];
        Self {
            disorder: DisorderSpec::Uncorrelated { kappa: 1.0 },
            coupling: 1.0,
            sites: 512,
            spacing: 0.25,
            fractions: below.iter().copied().chain([1.0, 2.0]).collect(),
            seeds: match profile {
                ToleranceProfile::Strict => 20,
                ToleranceProfile::Desk => 20,
            },
            stream: 15,
            epsilon: ThresholdPolicy::DEFAULT_RELATIVE,
            starts: 3,
        }
    }

    pub fn from_config(config: &RunConfig, profile: ToleranceProfile) -> Result<Self> {
        let grid = config.require_grid()?;
        if grid.dimension() != 1 {
            return Err(HarnessError::Validation("verify fragmentation: only one-dimensional grids are supported".into()));
        }
        let fractions = config
            .sweep
            .iter()
            .find(|a| a.parameter == crate::config::SweepParameter::DensityRatio)
            .map(|a| a.values.clone());
        let base = Self::new(profile);
        Ok(Self {
            disorder: config.params.disorder,
            coupling: config.params.coupling()?,
            sites: grid.shape[0],
            spacing: grid.spacing[0],
            fractions: fractions.unwrap_or(base.fractions.clone()),
            seeds: config.ensemble.realizations,
            stream: config.ensemble.stream,
            starts: config.gpe.starts,
            ..base
        })
    }
}

pub struct FragmentationOutcome {
    pub verdict: Verdict,
    pub scaling: ScalingReport,
    pub points: Vec<SweepPoint>,
}

/// Ground states of one disorder realization per seed at every density; the same seeds
/// are reused at each density.
pub fn fragmentation_trends(settings: &FragmentationSettings) -> Result<FragmentationOutcome> {
    let grid = Grid::new(vec![settings.sites], vec![settings.spacing])?;
    let params = natural(1, settings.disorder).with_coupling(settings.coupling);
    let n_c = derive_scales(&params)?.n_c()?;
    let synth = FieldSynthesizer::new(settings.disorder, &grid)?;
    let tasks: Vec<(usize, u64)> =
        (0..settings.fractions.len()).flat_map(|i| (0..settings.seeds as u64).map(move |s| (i, s))).collect();
    let reports = tasks
        .par_iter()
        .map(|&(i, s)| {
            let density = settings.fractions[i] * n_c;
            let disorder = synth.synthesize(Seed::new(settings.stream, s)).map_err(|e| HarnessError::in_realization(s, e))?;
            let problem = GpeProblem {
                disorder,
                trap: None,
                coupling: settings.coupling,
                particle_count: density * grid.volume(),
                mass: 1.0,
                hbar: 1.0,
            };
            let flow = FlowConfig { starts: settings.starts, seed: s, ..FlowConfig::default() };
            let state = solve_ground_state(&problem, &flow).map_err(|e| HarnessError::in_realization(s, e))?;
            let policy = ThresholdPolicy::MuLevel { mu: state.chemical_potential, g: settings.coupling, epsilon: settings.epsilon };
            detect_fragments(&state.density(), policy).map_err(|e| HarnessError::in_realization(s, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut reports = reports.into_iter();
    let points: Vec<SweepPoint> = settings
        .fractions
        .iter()
        .map(|f| SweepPoint { density: f * n_c, reports: reports.by_ref().take(settings.seeds).collect() })
        .collect();
    let scaling = fragmentation_scaling(&points, n_c, 1, &ScalingConfig::default())?;
    let mut v = Verdict::new("fragmentation trends");
    v.push(Check::new(
        "median fragment count non-increasing in n",
        scaling.count_nonincreasing,
        scaling.rows.iter().map(|r| r.median_count).fold(f64::NAN, f64::max),
        "true",
    ));
    v.push(Check::new(
        "median spacing/radius rises as n falls",
        scaling.spacing_ratio_monotone,
        f64::from(u8::from(scaling.spacing_ratio_monotone)),
        "true",
    ));
    let lower = scaling.spacing_slope_interval.map(|i| i.0).unwrap_or(f64::NAN);
    v.push(Check::new(
        format!("spacing-ratio slope lower bound at {}% confidence", scaling.confidence * 100.0),
        scaling.spacing_slope_positive,
        lower,
        "> 0",
    ));
    let perc = scaling.rows.iter().filter(|r| r.density >= n_c).map(|r| r.percolating_fraction).fold(f64::NAN, f64::min);
    v.push(Check::new(
        "single percolating fragment fraction at n >= n_c",
        scaling.percolates_above_critical == Some(true),
        perc,
        ">= 0.8",
    ));
    v.details = serde_json::json!({ "critical_density": n_c, "rows": scaling.rows });
    Ok(FragmentationOutcome { verdict: v, scaling, points })
}

// ---------------------------------------------------------------------------------------
// Closed-form checks

/// `1/t = e^5` at `Γ = 125` in three dimensions, and the relaxation time of a
/// rubidium-87 cloud with `L = 1 μm`.
pub fn relaxation_numbers() -> Result<Verdict> {
    let units = UnitSystem::default();
    // κ = 1 in natural units puts the Larkin length at the 1 μm reference length
    let scales = derive_scales(&natural(3, DisorderSpec::Uncorrelated { kappa: 1.0 }))?;
    let r = relaxation_time(125.0, &scales)?;
    let inv_t = 1.0 / r.tunneling;
    let tau = r.tau * units.time_si();
    let mut v = Verdict::new("relaxation numbers");
    v.push(Check::new(
        "1/t at Gamma = 125",
        (inv_t - 148.41).abs() < 0.005,
        inv_t,
        "148.41 to four significant figures",
    ));
    v.push(Check::new("tau in seconds", (0.04..=0.08).contains(&tau), tau, "[0.04, 0.08] s"));
    v.details = serde_json::json!({ "tau_natural": r.tau, "time_unit_s": units.time_si(), "larkin_length": scales.larkin_length });
    Ok(v)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Reductions that hold exactly: the three-dimensional critical density in two forms,
/// the identity dimension map, and filled-state versus well-statistics consistency.
pub fn exact_reductions() -> Result<Verdict> {
    let mut v = Verdict::new("exact reductions");
    let mut worst_nc: f64 = 0.0;
    for &(kappa, a) in &[(0.3, 1e-3), (1.0, 0.01), (2.5, 0.2), (7.0, 0.05)] {
        let params = natural(3, DisorderSpec::Uncorrelated { kappa }).with_scattering_length(a);
        let scales = derive_scales(&params)?;
        let general = critical_density_uncorrelated(3, 1.0, 1.0, scales.coupling()?, scales.larkin_length)?;
        let special = critical_density_three_dim(scales.larkin_length, a);
        worst_nc = worst_nc.max(rel(general, special));
    }
    v.push(Check::new("n_c general vs three-dimensional form", worst_nc <= 4.0 * f64::EPSILON, worst_nc, "<= 4 ulp"));

    let p3 = natural(3, DisorderSpec::OrnsteinZernike { kappa: 0.7, b: 0.4 })
        .with_scattering_length(0.02)
        .with_density(0.3)
        .with_transverse_trap(50.0);
    let mapped = reduced_dimension_map(&p3, 50.0, 3)?;
    let identical = mapped.params == p3;
    v.push(Check::new("dimension map at target 3 is the identity", identical, f64::from(u8::from(identical)), "true"));

    let mut worst_fs: f64 = 0.0;
    for d in 1..=3 {
        let params = natural(d, DisorderSpec::Uncorrelated { kappa: 1.3 }).with_coupling(0.8);
        let scales = derive_scales(&params)?;
        let n_c = scales.n_c()?;
        for mode in [PrefactorMode::Unity, PrefactorMode::Cardy] {
            for frac in [1e-3, 1e-2, 0.1] {
                let filled = filled_state_uncorrelated(frac * n_c, &scales, mode)?;
                let wells = well_statistics_uncorrelated(filled.well_radius, &scales, mode)?;
                worst_fs = worst_fs.max(rel(filled.spacing, wells.spacing)).max(rel(filled.tunneling, wells.tunneling));
            }
        }
    }
    v.push(Check::new("filled state vs well statistics", worst_fs <= 1e-12, worst_fs, "<= 1e-12"));
    Ok(v)
}

/// One-dimensional strong-coupling checks.
pub fn luttinger_checks() -> Result<Verdict> {
    let mut v = Verdict::new("luttinger limit");
    let gammas: Vec<f64> = (0..=1200).map(|i| 10f64.powf(-4.0 + 10.0 * i as f64 / 1200.0)).collect();
    let ks: Vec<f64> = gammas.iter().map(|&g| luttinger_parameter(g)).collect();
    let drops = ks.windows(2).filter(|w| w[1] <= w[0]).count();
    v.push(Check::new("K strictly increasing on 1e-4..1e6", drops == 0, drops as f64, "0 decreasing steps"));
    let k_inf = luttinger_parameter(1e8);
    v.push(Check::new("K at gamma = 1e8", (k_inf - 1.0).abs() <= 1e-3, k_inf, "1 within 1e-3"));
    let mut worst: f64 = 0.0;
    for &(kappa, k_kappa) in &[(1.0, 0.7), (2.3, 0.8), (0.4, 0.95)] {
        let (eff, _) = renormalized_disorder(kappa, k_kappa * (1.0 + 1e-12), k_kappa);
        worst = worst.max((eff - kappa).abs());
    }
    v.push(Check::new("kappa_eff jump at K = K_kappa from above", worst <= 1e-6, worst, "<= 1e-6"));
    Ok(v)
}

// ---------------------------------------------------------------------------------------

/// Report written by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
}

/// Runs a named experiment with its canonical settings, or with the disorder, grid and
/// ensemble of `config` when one is given.
pub fn run_verify(name: &str, config: Option<&RunConfig>, profile: ToleranceProfile, seed: Option<u64>) -> Result<VerifyReport> {
    let verdicts = match name {
        "dos_tail" => {
            let mut s = match config {
                Some(c) => TailSettings::from_config(c, profile)?,
                None => TailSettings::uncorrelated(profile),
            };
            if let Some(seed) = seed {
                s.stream = seed;
            }
            let out = dos_tail(&s)?;
            let mut v = vec![out.verdict];
            if s.record_modes {
                v.push(deep_state_geometry(&out.records)?);
            }
            v
        }
        "correlator" => {
            let mut s = match config {
                Some(c) => CorrelatorSettings::from_config(c, profile)?,
                None => CorrelatorSettings::all_kinds(profile),
            };
            if let Some(seed) = seed {
                s.stream = seed;
            }
            vec![correlator_fidelity(&s)?]
        }
        "fragmentation" => {
            let mut s = match config {
                Some(c) => FragmentationSettings::from_config(c, profile)?,
                None => FragmentationSettings::new(profile),
            };
            if let Some(seed) = seed {
                s.stream = seed;
            }
            vec![fragmentation_trends(&s)?.verdict]
        }
        other => {
            return Err(HarnessError::UnknownExperiment { name: other.to_string(), valid: EXPERIMENTS.to_vec() })
        }
    };
    let passed = verdicts.iter().all(Verdict::passed);
    Ok(VerifyReport { verdicts, passed })
}
