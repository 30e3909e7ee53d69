//! Regime diagram of a trapped gas in a random potential.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scales::{oscillator_length, unit_ball_volume, DisorderClass, PhysicalParams, Scales, OMEGA_3};
use crate::warning::{DomainWarning, WarningCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    #[serde(rename = "WeakDisorder_SingleCloud_Oscillator")]
    WeakDisorderSingleCloudOscillator,
    #[serde(rename = "WeakDisorder_ThomasFermi")]
    WeakDisorderThomasFermi,
    #[serde(rename = "StrongDisorder_NonErgodic")]
    StrongDisorderNonErgodic,
    #[serde(rename = "StrongDisorder_FragmentedLocalized")]
    StrongDisorderFragmentedLocalized,
    Superfluid,
}

impl RegimeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::WeakDisorderSingleCloudOscillator => "WeakDisorder_SingleCloud_Oscillator",
            RegimeLabel::WeakDisorderThomasFermi => "WeakDisorder_ThomasFermi",
            RegimeLabel::StrongDisorderNonErgodic => "StrongDisorder_NonErgodic",
            RegimeLabel::StrongDisorderFragmentedLocalized => "StrongDisorder_FragmentedLocalized",
            RegimeLabel::Superfluid => "Superfluid",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub label: RegimeLabel,
    pub gamma: f64,
    pub cloud_size: f64,
    pub fragment_size: Option<f64>,
    pub deepest_well_distance: Option<f64>,
    /// Natural logarithms of the ratios compared by the classification; a label
    /// follows from the signs of the margins on its decision path.
    pub boundary_distances: BTreeMap<String, f64>,
    pub warnings: Vec<DomainWarning>,
}

pub const MARGIN_DISORDER: &str = "disorder_weakness";
pub const MARGIN_INTERACTION_TRAP: &str = "interaction_vs_oscillator";
pub const MARGIN_INTERACTION_DISORDER: &str = "interaction_vs_disorder";
pub const MARGIN_GAMMA: &str = "log_gamma";

/// Interaction measure with dimension length^{d−2}: `3Na` in three dimensions and
/// `m g_d N/ħ²` below.
pub fn interaction_measure(d: usize, g: f64, count: f64, hbar: f64, mass: f64) -> f64 {
    let c = if d == 3 { OMEGA_3 } else { 1.0 };
    mass * g * count / (hbar * hbar * c)
}

/// Thomas–Fermi cloud radius: `(9Naℓ⁴/2)^{1/5}` in three dimensions,
/// `((d/Ω_d) m g_d N ℓ⁴/ħ²)^{1/(d+2)}` below.
pub fn thomas_fermi_radius(d: usize, g: f64, count: f64, hbar: f64, mass: f64, ell: f64) -> Result<f64> {
    let lambda = interaction_measure(d, g, count, hbar, mass);
    let c = if d == 3 { 1.5 } else { d as f64 / unit_ball_volume(d)? };
    Ok((c * lambda * ell.powi(4)).powf(1.0 / (d as f64 + 2.0)))
}

/// Regime parameter of delta-correlated disorder, `ℓ^{2d}/(λ L_d^{d+2})`; equals
/// `ℓ⁶/(3NaL⁵)` in three dimensions.
pub fn gamma_uncorrelated(d: usize, lambda: f64, ell: f64, larkin_length: f64) -> f64 {
    ell.powi(2 * d as i32) / (lambda * larkin_length.powi(d as i32 + 2))
}

/// Regime parameter of strongly correlated disorder, `4πħ²ℓ^{2d}/(Ω_{3−d} m g_d N B^{d+2})`;
/// equals `ℓ⁶/(NaB⁵)` in three dimensions.
pub fn gamma_correlated(d: usize, g: f64, count: f64, hbar: f64, mass: f64, ell: f64, big_b: f64) -> Result<f64> {
    let omega = unit_ball_volume(3 - d)?;
    Ok(4.0 * PI * hbar * hbar * ell.powi(2 * d as i32) / (omega * mass * g * count * big_b.powi(d as i32 + 2)))
}

pub fn trap_regime(params: &PhysicalParams, scales: &Scales) -> Result<RegimeReport> {
    let omega = params.trap_frequency.ok_or(Error::MissingTrap)?;
    let count = params.particle_count.ok_or(Error::MissingParameter("particle_count"))?;
    let d = scales.dimension;
    let (hbar, mass) = (scales.hbar, scales.mass);
    let g = scales.coupling()?;
    let ell = oscillator_length(hbar, mass, omega);
    let lambda = interaction_measure(d, g, count, hbar, mass);
    let df = d as f64;
    let tf_radius = thomas_fermi_radius(d, g, count, hbar, mass, ell)?;

    let mut margins = BTreeMap::new();
    let mut warnings = Vec::new();
    let interaction_trap = (lambda * ell.powf(2.0 - df)).ln();
    margins.insert(MARGIN_INTERACTION_TRAP.to_string(), interaction_trap);

    let weak_branch = |label_margin: f64| {
        if label_margin > 0.0 {
            (RegimeLabel::WeakDisorderThomasFermi, tf_radius)
        } else {
            (RegimeLabel::WeakDisorderSingleCloudOscillator, ell)
        }
    };

    let report = if scales.disorder_class == DisorderClass::StronglyCorrelated {
        let big_b = scales.b_length()?;
        let b = scales.disorder.correlation_length().expect("correlated");
        let u0 = scales.disorder.amplitude(d).expect("correlated");
        let gamma = gamma_correlated(d, g, count, hbar, mass, ell, big_b)?;
        let disorder = (big_b / ell).ln();
        let interaction_disorder = if d == 3 {
            (lambda * big_b * big_b / b.powi(3)).ln()
        } else {
            (g * count / (u0 * b.powi(d as i32))).ln()
        };
        margins.insert(MARGIN_DISORDER.to_string(), disorder);
        margins.insert(MARGIN_INTERACTION_DISORDER.to_string(), interaction_disorder);
        margins.insert(MARGIN_GAMMA.to_string(), gamma.ln());
        if disorder > 0.0 {
            let (label, cloud) = weak_branch(interaction_trap);
            RegimeReport::plain(label, gamma, cloud)
        } else if interaction_disorder <= 0.0 {
            let mut log = (ell * ell / (b * big_b)).ln();
            if log <= 0.0 {
                warnings.push(DomainWarning::new(
                    WarningCode::OutsideDeepTail,
                    "oscillator length below the correlation length; deepest-well distance clamped",
                ));
                log = 0.0;
            }
            let factor = if d == 3 { 1.0 } else { 2.0 * df };
            let distance = ell * ell / big_b * (factor * log).powf(0.25);
            RegimeReport {
                fragment_size: Some(b),
                deepest_well_distance: Some(distance),
                ..RegimeReport::plain(RegimeLabel::StrongDisorderNonErgodic, gamma, distance)
            }
        } else if gamma.ln() > 0.0 {
            let log = gamma.ln();
            let prefactor = if d == 3 { 2f64.powf(0.75) } else { 1.0 };
            RegimeReport {
                fragment_size: Some(b / log.sqrt()),
                ..RegimeReport::plain(
                    RegimeLabel::StrongDisorderFragmentedLocalized,
                    gamma,
                    prefactor * ell * ell / big_b * log.powf(0.25),
                )
            }
        } else {
            RegimeReport::plain(RegimeLabel::Superfluid, gamma, tf_radius)
        }
    } else {
        let big_l = scales.larkin_length;
        let gamma = gamma_uncorrelated(d, lambda, ell, big_l);
        let disorder = (big_l / ell).ln();
        let interaction_disorder = (lambda * big_l.powf(2.0 - df)).ln();
        margins.insert(MARGIN_DISORDER.to_string(), disorder);
        margins.insert(MARGIN_INTERACTION_DISORDER.to_string(), interaction_disorder);
        margins.insert(MARGIN_GAMMA.to_string(), gamma.ln());
        if disorder > 0.0 {
            let (label, cloud) = weak_branch(interaction_trap);
            RegimeReport::plain(label, gamma, cloud)
        } else if interaction_disorder <= 0.0 {
            let log = (ell / big_l).ln();
            let (distance, radius) = if d == 3 {
                (6.0 * 2f64.sqrt() * ell * ell / big_l * log, big_l / (6.0 * log))
            } else {
                let s = log.powf(1.0 / (4.0 - df));
                (ell * ell / big_l * s, big_l / s)
            };
            RegimeReport {
                fragment_size: Some(radius),
                deepest_well_distance: Some(distance),
                ..RegimeReport::plain(RegimeLabel::StrongDisorderNonErgodic, gamma, distance)
            }
        } else if gamma.ln() > 0.0 {
            let s = gamma.ln().powf(1.0 / (4.0 - df));
            RegimeReport {
                fragment_size: Some(big_l / s),
                ..RegimeReport::plain(RegimeLabel::StrongDisorderFragmentedLocalized, gamma, ell * ell / big_l * s)
            }
        } else {
            RegimeReport::plain(RegimeLabel::Superfluid, gamma, tf_radius)
        }
    };
    Ok(RegimeReport { boundary_distances: margins, warnings, ..report })
}

impl RegimeReport {
    fn plain(label: RegimeLabel, gamma: f64, cloud_size: f64) -> Self {
        Self {
            label,
            gamma,
            cloud_size,
            fragment_size: None,
            deepest_well_distance: None,
            boundary_distances: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    /// Recomputes the label from the recorded margins alone.
    pub fn label_from_margins(&self) -> RegimeLabel {
        let m = |k: &str| self.boundary_distances[k];
        if m(MARGIN_DISORDER) > 0.0 {
            if m(MARGIN_INTERACTION_TRAP) > 0.0 {
                RegimeLabel::WeakDisorderThomasFermi
            } else {
                RegimeLabel::WeakDisorderSingleCloudOscillator
            }
        } else if m(MARGIN_INTERACTION_DISORDER) <= 0.0 {
            RegimeLabel::StrongDisorderNonErgodic
        } else if m(MARGIN_GAMMA) > 0.0 {
            RegimeLabel::StrongDisorderFragmentedLocalized
        } else {
            RegimeLabel::Superfluid
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scales::{derive_scales, DisorderSpec};
    use approx::assert_relative_eq;

    /// ħ = m = ω = 1 so ℓ = 1; κ chosen for a given Larkin length, N for a given 3Na.
    fn trap3(larkin: f64, three_na: f64) -> (PhysicalParams, Scales) {
        let a = 1e-3;
        let kappa = larkin.powf(-0.5);
        let p = PhysicalParams::natural(3, DisorderSpec::Uncorrelated { kappa })
            .with_scattering_length(a)
            .with_trap(1.0)
            .with_particle_count(three_na / (3.0 * a));
        let s = derive_scales(&p).unwrap();
        (p, s)
    }

    #[test]
    fn weak_disorder_oscillator_cloud() {
        let (p, s) = trap3(10.0, 0.1);
        let r = trap_regime(&p, &s).unwrap();
        assert_eq!(r.label, RegimeLabel::WeakDisorderSingleCloudOscillator);
        assert_relative_eq!(r.cloud_size, 1.0);
    }

    #[test]
    fn weak_disorder_thomas_fermi_cloud() {
        let (p, s) = trap3(10.0, 100.0);
        let r = trap_regime(&p, &s).unwrap();
        assert_eq!(r.label, RegimeLabel::WeakDisorderThomasFermi);
        let na: f64 = 100.0 / 3.0;
        assert_relative_eq!(r.cloud_size, (4.5 * na).powf(0.2), max_relative = 1e-12);
    }

    #[test]
    fn strong_disorder_fragmented_cloud() {
        let (p, s) = trap3(0.01, 0.1);
        let r = trap_regime(&p, &s).unwrap();
        assert_eq!(r.label, RegimeLabel::StrongDisorderFragmentedLocalized);
        let gamma = 1.0 / (0.1 * 0.01f64.powi(5));
        assert_relative_eq!(r.gamma, gamma, max_relative = 1e-10);
        assert!(r.gamma > 1.0);
        assert_relative_eq!(r.fragment_size.unwrap(), 0.01 / gamma.ln(), max_relative = 1e-10);
        assert_relative_eq!(r.cloud_size, gamma.ln() / 0.01, max_relative = 1e-10);
    }

    #[test]
    fn strong_disorder_weak_interaction_is_non_ergodic() {
        let (p, s) = trap3(0.01, 0.001);
        let r = trap_regime(&p, &s).unwrap();
        assert_eq!(r.label, RegimeLabel::StrongDisorderNonErgodic);
        let log = 100f64.ln();
        assert_relative_eq!(r.deepest_well_distance.unwrap(), 6.0 * 2f64.sqrt() * 100.0 * log, max_relative = 1e-12);
    }

    #[test]
    fn superfluid_when_gamma_small() {
        let (p, s) = trap3(0.9, 2.0);
        let r = trap_regime(&p, &s).unwrap();
        assert!(r.gamma < 1.0);
        assert_eq!(r.label, RegimeLabel::Superfluid);
    }

    #[test]
    fn gamma_equals_density_ratio() {
        for (larkin, three_na) in [(0.01, 0.1), (0.03, 0.5), (0.2, 0.7)] {
            let (p, s) = trap3(larkin, three_na);
            let r = trap_regime(&p, &s).unwrap();
            let count = p.particle_count.unwrap();
            let n = count * larkin.powi(3);
            assert_relative_eq!(r.gamma / (s.n_c().unwrap() / n), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn correlated_fragmented_cloud() {
        let (u0, b) = (400.0, 0.2);
        let p = PhysicalParams::natural(3, DisorderSpec::GaussianCorrelated { u0, b })
            .with_scattering_length(1e-4)
            .with_trap(1.0)
            .with_particle_count(1e5);
        let s = derive_scales(&p).unwrap();
        assert_eq!(s.disorder_class, DisorderClass::StronglyCorrelated);
        let r = trap_regime(&p, &s).unwrap();
        let big_b = s.quantum_length.unwrap();
        assert_relative_eq!(r.gamma, 1.0 / (1e5 * 1e-4 * big_b.powi(5)), max_relative = 1e-10);
        assert_eq!(r.label, RegimeLabel::StrongDisorderFragmentedLocalized);
        assert_relative_eq!(r.cloud_size, 2f64.powf(0.75) / big_b * r.gamma.ln().powf(0.25), max_relative = 1e-12);
        assert_eq!(r.label_from_margins(), r.label);
    }

    #[test]
    fn missing_trap_is_reported() {
        let p = PhysicalParams::natural(3, DisorderSpec::Uncorrelated { kappa: 1.0 })
            .with_scattering_length(0.1)
            .with_particle_count(10.0);
        let s = derive_scales(&p).unwrap();
        assert!(matches!(trap_regime(&p, &s), Err(Error::MissingTrap)));
    }

    #[test]
    fn reduced_dimension_gamma() {
        // Γ = ℓ^{2d}/(N a_d^{d−2} L_d^{d+2}) with N a_d^{d−2} ≡ m g_d N/ħ².
        let p = PhysicalParams::natural(1, DisorderSpec::Uncorrelated { kappa: 30.0 })
            .with_coupling(0.02)
            .with_trap(1.0)
            .with_particle_count(1000.0);
        let s = derive_scales(&p).unwrap();
        let r = trap_regime(&p, &s).unwrap();
        let l1 = s.larkin_length;
        assert_relative_eq!(r.gamma, 1.0 / (0.02 * 1000.0 * l1.powi(3)), max_relative = 1e-12);
        assert_eq!(r.label, RegimeLabel::StrongDisorderFragmentedLocalized);
        assert_relative_eq!(r.fragment_size.unwrap(), l1 / r.gamma.ln().powf(1.0 / 3.0), max_relative = 1e-12);
    }
}
