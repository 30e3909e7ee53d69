//! One-dimensional Luttinger-liquid description of the weakly disordered gas.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::scales::{larkin_length_uncorrelated, OMEGA_1};

/// Critical Luttinger parameter of the pinning transition.
pub const K_CRITICAL: f64 = 2.0 / 3.0;

const GAMMA_WEAK: f64 = 0.1;
const GAMMA_STRONG: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interaction {
    /// Lieb–Liniger parameter `γ`.
    Gamma(f64),
    /// One-dimensional scattering length, `γ = 1/(π² n a)`.
    ScatteringLength(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LuttingerInput {
    pub dimension: usize,
    pub hbar: f64,
    pub mass: f64,
    pub density: f64,
    pub interaction: Interaction,
    pub kappa: f64,
    pub system_size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderRegime {
    /// `K < K_κ`: no fluctuation renormalization, the gas is localized.
    Unrenormalized,
    /// `K_κ < K < 2/3`: disorder renormalized to zero.
    Irrelevant,
    /// `K > max(K_κ, 2/3)`: power-law renormalization.
    PowerLaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuttingerReport {
    pub gamma: f64,
    pub k: f64,
    pub k_kappa: f64,
    pub k_l: f64,
    pub kappa_eff: f64,
    pub regime: DisorderRegime,
    /// `2⟨φ²⟩ = (1/K) ln(L_1/ξ_1)`, clamped at zero when `ξ_1 > L_1`.
    pub phase_variance: f64,
    pub superfluid: bool,
}

fn weak_branch(gamma: f64) -> f64 {
    let s = gamma.sqrt();
    s * (1.0 - 0.5 * s)
}

fn weak_slope_log(gamma: f64) -> f64 {
    0.5 * gamma.sqrt() - 0.5 * gamma
}

fn strong_branch(gamma: f64) -> f64 {
    (1.0 - 8.0 / (PI * PI * gamma)).sqrt()
}

fn strong_slope_log(gamma: f64) -> f64 {
    4.0 / (PI * PI * gamma) / strong_branch(gamma)
}

/// Luttinger parameter `K(γ)`: `γ^{1/2}(1 − γ^{1/2}/2)` for `γ ≤ 0.1`,
/// `(1 − 8/(π²γ))^{1/2}` for `γ ≥ 10`, and a cubic Hermite bridge in `ln γ` matching
/// values and slopes at both ends.
pub fn luttinger_parameter(gamma: f64) -> f64 {
    if gamma <= 0.0 {
        return 0.0;
    }
    if gamma.is_infinite() {
        return 1.0;
    }
    if gamma <= GAMMA_WEAK {
        return weak_branch(gamma);
    }
    if gamma >= GAMMA_STRONG {
        return strong_branch(gamma);
    }
    let (x0, x1) = (GAMMA_WEAK.ln(), GAMMA_STRONG.ln());
    let h = x1 - x0;
    let t = (gamma.ln() - x0) / h;
    let (y0, y1) = (weak_branch(GAMMA_WEAK), strong_branch(GAMMA_STRONG));
    let (m0, m1) = (weak_slope_log(GAMMA_WEAK) * h, strong_slope_log(GAMMA_STRONG) * h);
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
}

/// Debye–Waller renormalized disorder strength for given `K` and `K_κ`.
pub fn renormalized_disorder(kappa: f64, k: f64, k_kappa: f64) -> (f64, DisorderRegime) {
    if k <= k_kappa {
        (kappa, DisorderRegime::Unrenormalized)
    } else if k <= K_CRITICAL {
        (0.0, DisorderRegime::Irrelevant)
    } else {
        (kappa * (k_kappa / k).powf(1.0 / (k - K_CRITICAL)), DisorderRegime::PowerLaw)
    }
}

pub fn luttinger_analysis(input: &LuttingerInput) -> Result<LuttingerReport> {
    if input.dimension != 1 {
        return Err(Error::OutsideOneDimension(input.dimension));
    }
    let n = positive("mean_density", input.density)?;
    let (hbar, mass) = (positive("hbar", input.hbar)?, positive("mass", input.mass)?);
    let kappa = positive("kappa", input.kappa)?;
    let system_size = positive("system_size", input.system_size)?;
    let gamma = match input.interaction {
        Interaction::Gamma(g) if g >= 0.0 => g,
        Interaction::Gamma(g) => return Err(Error::NonPositiveInput { name: "gamma", value: g }),
        Interaction::ScatteringLength(a) => 1.0 / (PI * PI * n * positive("scattering_length", a)?),
    };
    let k = luttinger_parameter(gamma);
    let larkin = larkin_length_uncorrelated(1, hbar, mass, kappa);
    let k_kappa = 1.0 / (PI * n * larkin);
    let k_l = 1.0 / (PI * n * system_size);
    let (kappa_eff, regime) = renormalized_disorder(kappa, k, k_kappa);

    // ξ_1 = ħ/√(2 m g_1 n) with g_1 = Ω_1 ħ²/(m a) and a = 1/(π² n γ)
    let phase_variance = if k == 0.0 {
        f64::INFINITY
    } else {
        let g1 = OMEGA_1 * hbar * hbar * PI * PI * n * gamma / mass;
        let healing = hbar / (2.0 * mass * g1 * n).sqrt();
        ((larkin / healing).ln() / k).max(0.0)
    };
    Ok(LuttingerReport {
        gamma,
        k,
        k_kappa,
        k_l,
        kappa_eff,
        regime,
        phase_variance,
        superfluid: k > k_kappa && k > k_l,
    })
}
