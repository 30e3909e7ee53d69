//! Low-energy tail of the density of states from an ensemble of disorder realizations.
//!
//! The integrated density of states `N(E)` is accumulated from the lowest levels of every
//! realization and fitted to `ln N = c − (|E|/E₀)^p` by profiling the weighted linear fit
//! over `p`. The confidence interval comes from a bootstrap over realizations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{localization_metrics, lowest_eigenpairs_with, HamiltonianSpec, SolverConfig};
use crate::disorder::{FieldSynthesizer, Seed};
use crate::error::{positive, Error, Result};
use crate::grid::Grid;
use crate::scales::{larkin_energy, larkin_length_uncorrelated, DisorderSpec};
use crate::stats;

/// Smallest ensemble accepted by the tail fit.
pub const MIN_REALIZATIONS: usize = 100;

const P_MIN: f64 = 0.2;
const P_MAX: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailWindow {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailConfig {
    pub realizations: usize,
    /// Levels solved per realization.
    pub levels: usize,
    pub stream: u64,
    pub tol: f64,
    /// Explicit window; chosen automatically when absent.
    pub window: Option<TailWindow>,
    /// Energies sampled across the window.
    pub points: usize,
    pub bootstrap: usize,
    pub confidence: f64,
    /// Also record localization metrics of every level.
    pub record_modes: bool,
}

impl Default for TailConfig {
    fn default() -> Self {
        Self {
            realizations: 2000,
            levels: 20,
            stream: 0,
            tol: 1e-8,
            window: None,
            points: 30,
            bootstrap: 200,
            confidence: 0.95,
            record_modes: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub realization: u64,
    pub level: usize,
    pub energy: f64,
    pub residual: f64,
    pub ipr: Option<f64>,
    pub rms_radius: Option<f64>,
    pub centroid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosTailFit {
    pub exponent: f64,
    pub exponent_interval: (f64, f64),
    pub exponent_error: f64,
    pub confidence: f64,
    pub e0: f64,
    pub intercept: f64,
    pub window: TailWindow,
    pub energy_unit: f64,
    /// Weighted residual sum of squares per degree of freedom.
    pub reduced_chi2: f64,
    pub realizations: usize,
    pub levels_in_window: usize,
    /// `(E, N(E))` with `N` per unit volume.
    pub idos: Vec<(f64, f64)>,
}

/// Energy that separates the deep tail from the bulk: `E_d` for delta-like disorder
/// and `U0` for smooth correlated disorder.
pub fn tail_energy_unit(spec: &DisorderSpec, d: usize, hbar: f64, mass: f64) -> f64 {
    match (spec.kappa(), spec.shape_curvature()) {
        (Some(kappa), _) => larkin_energy(hbar, mass, larkin_length_uncorrelated(d, hbar, mass, kappa)),
        _ => spec.amplitude(d).unwrap_or(f64::NAN),
    }
}

/// Window `[P₁(E_ground) − ε, min(min_r E_k^{(r)}, −2ε)]` with `ε` the tail energy unit:
/// the upper edge keeps the histogram complete and inside the deep tail, the lower edge
/// stops one unit below the first percentile of ground energies.
pub fn auto_window(levels: &[Vec<f64>], energy_unit: f64) -> TailWindow {
    let ground: Vec<f64> = levels.iter().map(|l| l[0]).collect();
    let complete = levels.iter().map(|l| *l.last().expect("nonempty levels")).fold(f64::INFINITY, f64::min);
    TailWindow { lower: stats::quantile(&ground, 0.01) - energy_unit, upper: complete.min(-2.0 * energy_unit) }
}

struct Profile {
    p: f64,
    fit: stats::LinearFit,
}

fn fit_at(p: f64, e: &[f64], y: &[f64], w: &[f64]) -> Option<stats::LinearFit> {
    let x: Vec<f64> = e.iter().map(|e| e.abs().powf(p)).collect();
    stats::weighted_linear_fit(&x, y, w)
}

fn profile(e: &[f64], counts: &[f64], norm: f64) -> Option<Profile> {
    let (mut ee, mut y, mut w) = (Vec::new(), Vec::new(), Vec::new());
    for (&energy, &c) in e.iter().zip(counts) {
        if c > 0.0 {
            ee.push(energy);
            y.push((c / norm).ln());
            w.push(c);
        }
    }
    if ee.len() < 5 {
        return None;
    }
    let rss = |p: f64| fit_at(p, &ee, &y, &w).map_or(f64::INFINITY, |f| f.rss);
    let steps = ((P_MAX - P_MIN) / 0.01).round() as usize;
    let mut best = (P_MIN, f64::INFINITY);
    for i in 0..=steps {
        let p = P_MIN + i as f64 * 0.01;
        let r = rss(p);
        if r < best.1 {
            best = (p, r);
        }
    }
    // golden-section refinement around the grid minimum
    let (mut a, mut b) = ((best.0 - 0.01).max(P_MIN), (best.0 + 0.01).min(P_MAX));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..40 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if rss(c) < rss(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let p = 0.5 * (a + b);
    fit_at(p, &ee, &y, &w).map(|fit| Profile { p, fit })
}

/// Fits the tail exponent from per-realization ascending level lists.
pub fn fit_tail(levels: &[Vec<f64>], volume: f64, energy_unit: f64, config: &TailConfig) -> Result<DosTailFit> {
    positive("volume", volume)?;
    positive("energy_unit", energy_unit)?;
    if levels.len() < MIN_REALIZATIONS {
        return Err(Error::EnsembleTooSmall(levels.len()));
    }
    if levels.iter().any(|l| l.is_empty()) {
        return Err(Error::InvalidInput("a realization has no levels".into()));
    }
    let window = config.window.unwrap_or_else(|| auto_window(levels, energy_unit));
    if !(window.upper > window.lower) || config.points < 5 {
        return Err(Error::WindowTooNarrow(format!("[{:.6e}, {:.6e}]", window.lower, window.upper)));
    }
    let energies: Vec<f64> = (0..config.points)
        .map(|j| window.lower + (window.upper - window.lower) * j as f64 / (config.points - 1) as f64)
        .collect();
    // per-realization cumulative counts at each sampled energy
    let per_real: Vec<Vec<f64>> = levels
        .iter()
        .map(|l| energies.iter().map(|&e| l.partition_point(|&x| x <= e) as f64).collect())
        .collect();
    let totals = |rows: &mut dyn Iterator<Item = &Vec<f64>>| {
        let mut t = vec![0.0; energies.len()];
        for row in rows {
            t.iter_mut().zip(row).for_each(|(a, b)| *a += b);
        }
        t
    };
    let counts = totals(&mut per_real.iter());
    let r = levels.len();
    let norm = r as f64 * volume;
    let nonzero = counts.iter().filter(|&&c| c > 0.0).count();
    let Some(best) = profile(&energies, &counts, norm) else {
        return Err(Error::WindowTooNarrow(format!(
            "only {nonzero} populated energies in [{:.6e}, {:.6e}]",
            window.lower, window.upper
        )));
    };

    let boots: Vec<f64> = (0..config.bootstrap as u64)
        .into_par_iter()
        .filter_map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.stream ^ 0xb007_57ab);
            rng.set_stream(b);
            let picks: Vec<&Vec<f64>> = (0..r).map(|_| &per_real[rng.random_range(0..r)]).collect();
            let c = totals(&mut picks.into_iter());
            profile(&energies, &c, norm).map(|p| p.p)
        })
        .collect();
    let (interval, error) = if boots.len() >= 2 {
        let alpha = 0.5 * (1.0 - config.confidence);
        ((stats::quantile(&boots, alpha), stats::quantile(&boots, 1.0 - alpha)), stats::variance(&boots).sqrt())
    } else {
        ((f64::NAN, f64::NAN), f64::NAN)
    };
    let slope = best.fit.slope;
    Ok(DosTailFit {
        exponent: best.p,
        exponent_interval: interval,
        exponent_error: error,
        confidence: config.confidence,
        e0: if slope < 0.0 { (-slope).powf(-1.0 / best.p) } else { f64::NAN },
        intercept: best.fit.intercept,
        window,
        energy_unit,
        reduced_chi2: best.fit.rss / best.fit.dof as f64,
        realizations: r,
        levels_in_window: levels.iter().flatten().filter(|&&e| e >= window.lower && e <= window.upper).count(),
        idos: energies.iter().zip(&counts).map(|(&e, &c)| (e, c / norm)).collect(),
    })
}

/// Lattice, mass and ħ shared by every realization of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTemplate {
    pub grid: Grid,
    pub mass: f64,
    pub hbar: f64,
}

/// Solves the lowest levels of every realization and fits the tail exponent.
pub fn dos_tail_fit(
    template: &HamiltonianTemplate,
    disorder: &DisorderSpec,
    config: &TailConfig,
) -> Result<(DosTailFit, Vec<LevelRecord>)> {
    if config.realizations < MIN_REALIZATIONS {
        return Err(Error::EnsembleTooSmall(config.realizations));
    }
    let synth = FieldSynthesizer::new(*disorder, &template.grid)?;
    let solver = SolverConfig { tol: config.tol, ..SolverConfig::default() };
    let per_real: Vec<Vec<LevelRecord>> = (0..config.realizations as u64)
        .into_par_iter()
        .map(|r| -> Result<Vec<LevelRecord>> {
            let potential = synth.synthesize(Seed::new(config.stream, r))?;
            let spec = HamiltonianSpec::new(potential, template.mass, template.hbar)?;
            let set = lowest_eigenpairs_with(&spec, config.levels, &solver)?;
            set.energies
                .iter()
                .zip(&set.residuals)
                .zip(&set.modes)
                .enumerate()
                .map(|(level, ((&energy, &residual), mode))| {
                    let metrics = if config.record_modes { Some(localization_metrics(mode)?) } else { None };
                    Ok(LevelRecord {
                        realization: r,
                        level,
                        energy,
                        residual,
                        ipr: metrics.as_ref().map(|m| m.ipr),
                        rms_radius: metrics.as_ref().map(|m| m.rms_radius),
                        centroid: metrics.map(|m| m.centroid),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let levels: Vec<Vec<f64>> = per_real.iter().map(|v| v.iter().map(|l| l.energy).collect()).collect();
    let unit = tail_energy_unit(disorder, template.grid.dimension(), template.hbar, template.mass);
    let fit = fit_tail(&levels, template.grid.volume(), unit, config)?;
    Ok((fit, per_real.into_iter().flatten().collect()))
}
