//! Deep-well statistics and the filled (fragmented) ground state.

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::scales::{DisorderClass, Scales};
use crate::warning::{DomainWarning, WarningCode};

/// Energy (in units of `U0`) at which correlated wells percolate.
pub const PERCOLATION_ENERGY: f64 = -0.9;

/// Power-law prefactor `f(x) = x^α`, `x = L_d/R`, of the tail probability.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", content = "alpha", rename_all = "snake_case")]
pub enum PrefactorMode {
    #[default]
    Unity,
    /// `α = 1` for `d = 2, 3`, `α = 0` for `d = 1`.
    Cardy,
    Custom(f64),
}

impl PrefactorMode {
    pub fn exponent(&self, d: usize) -> f64 {
        match *self {
            PrefactorMode::Unity => 0.0,
            PrefactorMode::Cardy => {
                if d == 1 {
                    0.0
                } else {
                    1.0
                }
            }
            PrefactorMode::Custom(alpha) => alpha,
        }
    }

    pub fn evaluate(&self, x: f64, d: usize) -> f64 {
        let alpha = self.exponent(d);
        if alpha == 0.0 {
            1.0
        } else {
            x.powf(alpha)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellStats {
    pub radius: f64,
    pub energy_level: f64,
    pub probability: f64,
    pub well_density: f64,
    pub spacing: f64,
    pub tunneling: f64,
    pub prefactor_f: f64,
    /// Wells at this depth overlap into a connected network.
    pub percolating: bool,
    pub warnings: Vec<DomainWarning>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilledState {
    pub well_radius: f64,
    pub spacing: f64,
    pub chemical_potential: f64,
    pub tunneling: f64,
    pub particles_per_well: f64,
    pub level_energy: Option<f64>,
    pub momentum_width: Option<f64>,
    pub critical_density: f64,
    pub warnings: Vec<DomainWarning>,
}

/// Statistics of delta-correlated wells of radius `R`.
pub fn well_statistics_uncorrelated(radius: f64, scales: &Scales, mode: PrefactorMode) -> Result<WellStats> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::NonPositiveRadius(radius));
    }
    let d = scales.dimension;
    let df = d as f64;
    let big_l = scales.larkin_length;
    let x = big_l / radius;
    let f = mode.evaluate(x, d);
    let exponent = x.powf(4.0 - df);
    let probability = f * (-exponent).exp();
    let spacing = radius * f.powf(-1.0 / df) * (exponent / df).exp();
    let ratio = spacing / radius;

    let mut warnings = Vec::new();
    if radius > big_l {
        warnings.push(DomainWarning::new(
            WarningCode::OutsideDeepTail,
            format!("radius {radius} exceeds the Larkin length {big_l}"),
        ));
    }
    let percolating = ratio <= std::f64::consts::E * (1.0 + 1e-12);
    Ok(WellStats {
        radius,
        energy_level: -scales.hbar * scales.hbar / (2.0 * scales.mass * radius * radius),
        probability,
        well_density: probability / radius.powi(d as i32),
        spacing,
        tunneling: (-ratio).exp(),
        prefactor_f: f,
        percolating,
        warnings,
    })
}

/// Filled-well state of an interacting gas of density `n < n_c` in delta-correlated disorder.
///
/// The spacing is `R (n_c/(f n))^{1/d}` and the tunneling amplitude is `exp(−spacing/R)`,
/// so feeding `R(n)` back into [`well_statistics_uncorrelated`] reproduces both.
pub fn filled_state_uncorrelated(n: f64, scales: &Scales, mode: PrefactorMode) -> Result<FilledState> {
    positive("mean_density", n)?;
    let n_c = scales.n_c()?;
    if n >= n_c {
        return Err(Error::DensityAboveCritical { n, n_c });
    }
    let d = scales.dimension;
    let df = d as f64;
    let log = (n_c / n).ln();
    let mut warnings = Vec::new();
    if log < 1.0 {
        warnings.push(DomainWarning::new(
            WarningCode::NearCritical,
            format!("ln(n_c/n) = {log:.3} < 1; filled-well formulas are marginal"),
        ));
    }
    let x = log.powf(1.0 / (4.0 - df));
    let radius = scales.larkin_length / x;
    let f = mode.evaluate(x, d);
    let ratio = (n_c / (f * n)).powf(1.0 / df);
    Ok(FilledState {
        well_radius: radius,
        spacing: radius * ratio,
        chemical_potential: -scales.larkin_energy * log.powf(2.0 / (4.0 - df)),
        tunneling: (-ratio).exp(),
        particles_per_well: n_c * radius.powi(d as i32) / f,
        level_energy: None,
        momentum_width: None,
        critical_density: n_c,
        warnings,
    })
}

/// Probability of a correlated well hosting a level at `E`, corrected for the excited
/// states of the well oscillator: `exp(−(E² + 3|E|ħω)/2U0²) [1 − exp(−|E|ħω/U0²)]^{−3}`.
pub fn excited_state_probability(energy: f64, u0: f64, hbar: f64, omega_well: f64) -> Result<f64> {
    if !(energy < 0.0) {
        return Err(Error::NonNegativeEnergy(energy));
    }
    positive("u0", u0)?;
    if !(omega_well > 0.0) {
        return Err(Error::ZeroFrequency);
    }
    let variance = u0 * u0;
    let level = energy.abs() * hbar * omega_well;
    let bracket = -(-level / variance).exp_m1();
    Ok((-(energy * energy + 3.0 * level) / (2.0 * variance)).exp() / bracket.powi(3))
}

/// Oscillator frequency `ω_w = (|E| |h''(0)|/(m b²))^{1/2}` of a correlated well.
pub fn well_frequency(energy: f64, b: f64, mass: f64, curvature: f64) -> f64 {
    (energy.abs() * curvature / (mass * b * b)).sqrt()
}

fn correlated_parts(scales: &Scales) -> Result<(f64, f64)> {
    let d = scales.dimension;
    match (scales.disorder.amplitude(d), scales.disorder.correlation_length()) {
        (Some(u0), Some(b)) => Ok((u0, b)),
        _ => Err(Error::WrongDisorderClass { expected: "correlated", found: scales.disorder_class.name() }),
    }
}

/// Statistics of wells of a finite-range potential hosting a level at `E`.
///
/// In three dimensions `t = exp(−spacing/B)`; otherwise the decay length is the
/// de Broglie length `ħ/√(2m|E|)`. When `omega_well` is given the probability includes
/// the excited-state correction.
pub fn well_statistics_correlated(energy: f64, scales: &Scales, omega_well: Option<f64>) -> Result<WellStats> {
    if !(energy < 0.0) {
        return Err(Error::NonNegativeEnergy(energy));
    }
    let (u0, b) = correlated_parts(scales)?;
    let d = scales.dimension;
    let df = d as f64;
    let reduced = energy / u0;
    let mut warnings = Vec::new();
    if reduced.abs() < 2.0 {
        warnings.push(DomainWarning::new(
            WarningCode::ShallowLevel,
            format!("|E|/U0 = {:.3} < 2; the Gaussian tail is not yet asymptotic", reduced.abs()),
        ));
    }
    let percolating = reduced >= PERCOLATION_ENERGY;
    if percolating {
        warnings.push(DomainWarning::new(
            WarningCode::PercolationThreshold,
            format!("E/U0 = {reduced:.3} is at or above the percolation threshold {PERCOLATION_ENERGY}"),
        ));
    }
    let probability = match omega_well {
        Some(w) => excited_state_probability(energy, u0, scales.hbar, w)?,
        None => (-reduced * reduced / 2.0).exp(),
    };
    let spacing = b * (reduced * reduced / (2.0 * df)).exp();
    let decay = if d == 3 {
        scales.b_length()?
    } else {
        scales.hbar / (2.0 * scales.mass * energy.abs()).sqrt()
    };
    Ok(WellStats {
        radius: b,
        energy_level: energy,
        probability,
        well_density: probability / b.powi(d as i32),
        spacing,
        tunneling: (-spacing / decay).exp(),
        prefactor_f: 1.0,
        percolating,
        warnings,
    })
}

/// Filled-well state of a gas in strongly correlated disorder.
pub fn filled_state_correlated(n: f64, scales: &Scales) -> Result<FilledState> {
    positive("mean_density", n)?;
    if scales.disorder_class != DisorderClass::StronglyCorrelated {
        return Err(Error::WrongDisorderClass { expected: "strongly correlated", found: scales.disorder_class.name() });
    }
    let (u0, b) = correlated_parts(scales)?;
    let big_b = scales.b_length()?;
    let n_c = scales.n_c()?;
    if n >= n_c {
        return Err(Error::DensityAboveCritical { n, n_c });
    }
    let d = scales.dimension;
    let df = d as f64;
    let log = (n_c / n).ln();
    let mut warnings = Vec::new();
    if log <= 2.25 {
        warnings.push(DomainWarning::new(
            WarningCode::NearCritical,
            format!("ln(n_c/n) = {log:.3} ≤ 9/4; the chemical-potential bracket changes sign"),
        ));
    }
    let level = -u0 * (2.0 * log).sqrt();
    let radius = b / log.sqrt();
    let ratio = (n_c / n).powf(1.0 / df);
    let momentum_width = scales
        .disorder
        .shape_curvature()
        .map(|c| scales.mass * well_frequency(level, b, scales.mass, c) * radius);
    Ok(FilledState {
        well_radius: radius,
        spacing: b * ratio,
        chemical_potential: level * (1.0 - 2.25 / log),
        tunneling: (-(b / big_b) * ratio).exp(),
        particles_per_well: n_c * b.powi(d as i32),
        level_energy: Some(level),
        momentum_width,
        critical_density: n_c,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scales::{derive_scales, DisorderSpec, PhysicalParams};
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn box_scales(d: usize) -> Scales {
        let mut p = PhysicalParams::natural(d, DisorderSpec::Uncorrelated { kappa: 1.0 });
        p = if d == 2 { p.with_coupling(0.3) } else { p.with_scattering_length(0.05) };
        derive_scales(&p).unwrap()
    }

    fn correlated_scales(d: usize) -> Scales {
        let p = PhysicalParams::natural(d, DisorderSpec::GaussianCorrelated { u0: 1.0, b: 10.0 }).with_coupling(0.01);
        derive_scales(&p).unwrap()
    }

    #[test]
    fn unit_radius_well() {
        let s = box_scales(3);
        let w = well_statistics_uncorrelated(1.0, &s, PrefactorMode::Unity).unwrap();
        assert_relative_eq!(w.probability, 0.36787944117144233, max_relative = 1e-15);
        assert_relative_eq!(w.spacing, 1.3956124250860895, max_relative = 1e-15);
        assert_relative_eq!(w.tunneling, (-1.3956124250860895f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(w.energy_level, -s.larkin_energy);
        assert!(w.warnings.is_empty());
    }

    #[test]
    fn percolation_crossover_radius() {
        let s = box_scales(3);
        let w = well_statistics_uncorrelated(1.0 / 3.0, &s, PrefactorMode::Unity).unwrap();
        assert_relative_eq!(w.tunneling, (-E).exp(), max_relative = 1e-14);
        assert_relative_eq!(w.tunneling, 0.06598803584531254, max_relative = 1e-14);
        assert!(w.percolating);
        let w = well_statistics_uncorrelated(0.2, &s, PrefactorMode::Unity).unwrap();
        assert!(!w.percolating);
    }

    #[test]
    fn large_radius_exponent_vanishes() {
        let s = box_scales(3);
        let w = well_statistics_uncorrelated(1e9, &s, PrefactorMode::Unity).unwrap();
        assert!((w.probability - 1.0).abs() < 1e-8);
        assert!(w.warnings.iter().any(|x| x.code == WarningCode::OutsideDeepTail));
        assert!(matches!(
            well_statistics_uncorrelated(0.0, &s, PrefactorMode::Unity),
            Err(Error::NonPositiveRadius(_))
        ));
    }

    #[test]
    fn filled_state_at_log_three() {
        let s = box_scales(3);
        let n_c = s.n_c().unwrap();
        let f = filled_state_uncorrelated(n_c * (-3f64).exp(), &s, PrefactorMode::Unity).unwrap();
        assert_relative_eq!(f.well_radius, 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(f.spacing, E / 3.0, max_relative = 1e-14);
        assert_relative_eq!(f.chemical_potential, -4.5, max_relative = 1e-14);
        assert_relative_eq!(f.tunneling, (-E).exp(), max_relative = 1e-14);
        assert!(f.warnings.is_empty());
    }

    #[test]
    fn filled_state_tunneling_example() {
        let s = box_scales(3);
        let n_c = s.n_c().unwrap();
        let f = filled_state_uncorrelated(n_c / 125.0, &s, PrefactorMode::Unity).unwrap();
        assert_relative_eq!(f.tunneling, 6.737946999085467e-3, max_relative = 1e-12);
        assert_relative_eq!(1.0 / f.tunneling, 148.4131591025766, max_relative = 1e-12);
    }

    #[test]
    fn filled_state_one_dim_unit_log() {
        let s = box_scales(1);
        let n_c = s.n_c().unwrap();
        let f = filled_state_uncorrelated(n_c / E, &s, PrefactorMode::Unity).unwrap();
        assert_relative_eq!(f.well_radius, s.larkin_length, max_relative = 1e-14);
    }

    #[test]
    fn filled_state_guards() {
        let s = box_scales(3);
        let n_c = s.n_c().unwrap();
        assert!(matches!(
            filled_state_uncorrelated(n_c, &s, PrefactorMode::Unity),
            Err(Error::DensityAboveCritical { .. })
        ));
        let f = filled_state_uncorrelated(0.8 * n_c, &s, PrefactorMode::Unity).unwrap();
        assert_eq!(f.warnings[0].code, WarningCode::NearCritical);
    }

    #[test]
    fn filled_state_reproduced_by_well_statistics() {
        for d in 1..=3 {
            let s = box_scales(d);
            let n_c = s.n_c().unwrap();
            for mode in [PrefactorMode::Unity, PrefactorMode::Cardy, PrefactorMode::Custom(0.7)] {
                for k in [1.5, 3.0, 7.0, 20.0] {
                    let f = filled_state_uncorrelated(n_c * (-k as f64).exp(), &s, mode).unwrap();
                    let w = well_statistics_uncorrelated(f.well_radius, &s, mode).unwrap();
                    assert_relative_eq!(w.spacing, f.spacing, max_relative = 1e-13);
                    assert_relative_eq!(w.tunneling, f.tunneling, max_relative = 1e-12);
                    // 𝒩 = n / n_w at the filled radius
                    let n = n_c * (-k as f64).exp();
                    assert_relative_eq!(f.particles_per_well, n / w.well_density, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn excited_state_examples() {
        // |E|ħω/U0² = 1 at E = −3U0
        let q = excited_state_probability(-3.0, 1.0, 1.0, 1.0 / 3.0).unwrap();
        let bracket = 1.0 - (-1f64).exp();
        assert_relative_eq!(q, (-6f64).exp() / bracket.powi(3), max_relative = 1e-14);
        assert_relative_eq!(q, 9.816e-3, max_relative = 1e-3);
        // bracket of ln 2 gives a factor 8
        let e: f64 = -2.0;
        let w = 2f64.ln() / e.abs();
        let q = excited_state_probability(e, 1.0, 1.0, w).unwrap();
        let bare = (-(e * e + 3.0 * e.abs() * w) / 2.0).exp();
        assert_relative_eq!(q / bare, 8.0, max_relative = 1e-13);
        // large level spacing: bracket → 1
        let q = excited_state_probability(-3.0, 1.0, 1.0, 100.0).unwrap();
        assert_relative_eq!(q, (-(9.0 + 900.0) / 2.0f64).exp(), max_relative = 1e-12);
        assert!(matches!(excited_state_probability(-3.0, 1.0, 1.0, 0.0), Err(Error::ZeroFrequency)));
        assert!(matches!(excited_state_probability(0.5, 1.0, 1.0, 1.0), Err(Error::NonNegativeEnergy(_))));
    }

    #[test]
    fn excited_state_matches_level_sum() {
        // Sum over oscillator levels with the level shift linearized in ħω.
        let (e, u0, hw) = (-3.0f64, 1.0f64, 1.0 / 3.0);
        let mut sum = 0.0;
        for n1 in 0..=50 {
            for n2 in 0..=50 {
                for n3 in 0..=50 {
                    let shift = (n1 + n2 + n3) as f64 + 1.5;
                    sum += (-(e * e + 2.0 * e.abs() * hw * shift) / (2.0 * u0 * u0)).exp();
                }
            }
        }
        let q = excited_state_probability(e, u0, 1.0, hw).unwrap();
        assert_relative_eq!(q, sum, max_relative = 1e-12);
    }

    #[test]
    fn correlated_well_examples() {
        let s = correlated_scales(3);
        let w = well_statistics_correlated(-1.0, &s, None).unwrap();
        assert_relative_eq!(w.probability, 0.6065306597126334, max_relative = 1e-15);
        let w = well_statistics_correlated(-2.0, &s, None).unwrap();
        assert_relative_eq!(w.spacing / 10.0, 1.9477340410546757, max_relative = 1e-14);
        assert!(!w.percolating);
        let w = well_statistics_correlated(-0.9, &s, None).unwrap();
        assert!(w.percolating);
        assert!(w.warnings.iter().any(|x| x.code == WarningCode::PercolationThreshold));
        let big_b = s.quantum_length.unwrap();
        let w = well_statistics_correlated(-3.0, &s, None).unwrap();
        assert_relative_eq!(w.tunneling, (-(10.0 / big_b) * 1.5f64.exp()).exp(), max_relative = 1e-12);
    }

    #[test]
    fn correlated_filled_state_examples() {
        let s = correlated_scales(3);
        let n_c = s.n_c().unwrap();
        let f = filled_state_correlated(n_c * (-2f64).exp(), &s).unwrap();
        assert_relative_eq!(f.level_energy.unwrap(), -2.0, max_relative = 1e-14);
        assert_relative_eq!(f.well_radius / 10.0, std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-14);
        assert_relative_eq!(f.spacing / 10.0, 1.9477340410546757, max_relative = 1e-14);
        let f = filled_state_correlated(n_c * (-9f64).exp(), &s).unwrap();
        assert_relative_eq!(f.chemical_potential, -18f64.sqrt() * 0.75, max_relative = 1e-14);
        assert_relative_eq!(f.chemical_potential, -3.1820, max_relative = 1e-4);
        for k in [3.0, 5.0, 11.0] {
            let f2 = filled_state_correlated(n_c * (-k as f64).exp(), &s).unwrap();
            assert_relative_eq!(f2.particles_per_well, n_c * 1000.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn correlated_requires_strong_class() {
        let p = PhysicalParams::natural(3, DisorderSpec::GaussianCorrelated { u0: 0.01, b: 0.5 }).with_coupling(0.1);
        let s = derive_scales(&p).unwrap();
        assert!(matches!(filled_state_correlated(1e-6, &s), Err(Error::WrongDisorderClass { .. })));
        let s = box_scales(3);
        assert!(matches!(well_statistics_correlated(-2.0, &s, None), Err(Error::WrongDisorderClass { .. })));
    }

    #[test]
    fn correlated_momentum_width() {
        let s = correlated_scales(3);
        let n_c = s.n_c().unwrap();
        let f = filled_state_correlated(n_c * (-4f64).exp(), &s).unwrap();
        let e = f.level_energy.unwrap();
        let omega = (e.abs() / 100.0).sqrt();
        assert_relative_eq!(f.momentum_width.unwrap(), omega * f.well_radius, max_relative = 1e-14);
    }
}
