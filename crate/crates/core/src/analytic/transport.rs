//! Superfluid-side corrections, hopping transport and tunneling relaxation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::scales::{scattering_length_from_coupling, Scales};
use crate::warning::{DomainWarning, WarningCode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperfluidCorrection {
    /// `(√π/3) E_d (n/n_c)^{1/2}`.
    pub delta_epsilon: f64,
    /// Second-order perturbative form `κ²(man)^{1/2}/(2√π ħ²)`; absent without `κ`.
    pub delta_epsilon_perturbative: Option<f64>,
    /// `ξ/L_d`.
    pub relative_depletion_scale: f64,
}

pub fn superfluid_corrections(n: f64, scales: &Scales) -> Result<SuperfluidCorrection> {
    positive("mean_density", n)?;
    match scales.dimension {
        1 => return Err(Error::DivergentInOneDimension),
        3 => {}
        d => return Err(Error::InvalidDimension(d)),
    }
    let n_c = scales.n_c()?;
    if n <= n_c {
        return Err(Error::BelowCritical { n, n_c });
    }
    let (hbar, mass) = (scales.hbar, scales.mass);
    let g = scales.coupling()?;
    let a = scattering_length_from_coupling(3, g, hbar, mass)?;
    let healing = hbar / (2.0 * mass * g * n).sqrt();
    Ok(SuperfluidCorrection {
        delta_epsilon: PI.sqrt() / 3.0 * scales.larkin_energy * (n / n_c).sqrt(),
        delta_epsilon_perturbative: scales
            .disorder
            .kappa()
            .map(|kappa| kappa * kappa * (mass * a * n).sqrt() / (2.0 * PI.sqrt() * hbar * hbar)),
        relative_depletion_scale: healing / scales.larkin_length,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hopping {
    pub hop_exponent: f64,
    pub conductivity_factor: f64,
}

/// Variable-range hopping: exponent `C (E_d n_c/(T n))^{1/4}`.
pub fn vrh(temperature: f64, n: f64, scales: &Scales, c: f64) -> Result<Hopping> {
    if !(temperature > 0.0) {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    positive("mean_density", n)?;
    let n_c = scales.n_c()?;
    if n >= n_c {
        return Err(Error::DensityAboveCritical { n, n_c });
    }
    let hop_exponent = c * (scales.larkin_energy * n_c / (temperature * n)).powf(0.25);
    Ok(Hopping { hop_exponent, conductivity_factor: (-hop_exponent).exp() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relaxation {
    pub tau: f64,
    pub tunneling: f64,
    pub frequency: f64,
    pub warnings: Vec<DomainWarning>,
}

/// Relaxation time `τ = 2π/(ω_n t)` of a fragmented cloud with regime parameter `Γ`.
///
/// `t = exp(−Γ^{1/d})` and `ω_n = ħ/(m R²)` is the level scale of a fragment of radius
/// `R = L_d/(ln Γ)^{1/(4−d)}`, i.e. `(ħ/(mL²))(ln Γ)²` in three dimensions.
pub fn relaxation_time(gamma: f64, scales: &Scales) -> Result<Relaxation> {
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(Error::GammaNotAboveOne(gamma));
    }
    let df = scales.dimension as f64;
    let log = gamma.ln();
    let radius = scales.larkin_length / log.powf(1.0 / (4.0 - df));
    let frequency = scales.hbar / (scales.mass * radius * radius);
    let tunneling = (-gamma.powf(1.0 / df)).exp();
    let mut warnings = Vec::new();
    if log < 1.0 {
        warnings.push(DomainWarning::new(
            WarningCode::DivergentRelaxation,
            format!("ln Γ = {log:.3} < 1; the relaxation time diverges as Γ → 1"),
        ));
    }
    Ok(Relaxation { tau: 2.0 * PI / (frequency * tunneling), tunneling, frequency, warnings })
}
