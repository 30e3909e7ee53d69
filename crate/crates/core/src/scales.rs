//! Parameter model and the characteristic scales derived from it.
//!
//! Energies follow one convention throughout the crate: `E_d = ħ²/(2 m L_d²)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::warning::{DomainWarning, WarningCode};

/// Volume of the unit ball in one dimension.
pub const OMEGA_1: f64 = 2.0;
/// Volume of the unit ball in two dimensions.
pub const OMEGA_2: f64 = PI;
/// Volume of the unit ball in three dimensions.
pub const OMEGA_3: f64 = 4.0 * PI / 3.0;

/// Ratio below which a `≪` inequality counts as satisfied by the window checks.
pub const MUCH_LESS: f64 = 0.1;

/// Unit-ball volume `Ω_d`; `Ω_0 = 1` is included for the reduced-dimension map.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    match d {
        0 => Ok(1.0),
        1 => Ok(OMEGA_1),
        2 => Ok(OMEGA_2),
        3 => Ok(OMEGA_3),
        _ => Err(Error::InvalidDimension(d)),
    }
}

fn check_dimension(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(d))
    }
}

/// Statistics of the Gaussian random potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DisorderSpec {
    /// Delta-correlated: `⟨U(x)U(x')⟩ = κ² δ(x − x')`.
    Uncorrelated { kappa: f64 },
    /// Ornstein–Zernike: spectrum `κ²/(1 + b²q²)`.
    OrnsteinZernike { kappa: f64, b: f64 },
    /// `⟨U(x)U(x')⟩ = U0² exp(−r²/2b²)`.
    GaussianCorrelated { u0: f64, b: f64 },
    /// `⟨U(x)U(x')⟩ = U0² /(1 + r²/b²)`.
    LorentzCorrelated { u0: f64, b: f64 },
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DisorderSpec::Uncorrelated { kappa } => positive("kappa", kappa).map(drop),
            DisorderSpec::OrnsteinZernike { kappa, b } => {
                positive("kappa", kappa)?;
                positive("b", b).map(drop)
            }
            DisorderSpec::GaussianCorrelated { u0, b } | DisorderSpec::LorentzCorrelated { u0, b } => {
                positive("u0", u0)?;
                positive("b", b).map(drop)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DisorderSpec::Uncorrelated { .. } => "uncorrelated",
            DisorderSpec::OrnsteinZernike { .. } => "ornstein_zernike",
            DisorderSpec::GaussianCorrelated { .. } => "gaussian",
            DisorderSpec::LorentzCorrelated { .. } => "lorentz",
        }
    }

    pub fn correlation_length(&self) -> Option<f64> {
        match *self {
            DisorderSpec::Uncorrelated { .. } => None,
            DisorderSpec::OrnsteinZernike { b, .. }
            | DisorderSpec::GaussianCorrelated { b, .. }
            | DisorderSpec::LorentzCorrelated { b, .. } => Some(b),
        }
    }

    pub fn kappa(&self) -> Option<f64> {
        match *self {
            DisorderSpec::Uncorrelated { kappa } | DisorderSpec::OrnsteinZernike { kappa, .. } => Some(kappa),
            _ => None,
        }
    }

    /// Potential amplitude `U0`; for Ornstein–Zernike `U0 = κ / b^{d/2}`.
    pub fn amplitude(&self, d: usize) -> Option<f64> {
        match *self {
            DisorderSpec::Uncorrelated { .. } => None,
            DisorderSpec::OrnsteinZernike { kappa, b } => Some(kappa / b.powf(d as f64 / 2.0)),
            DisorderSpec::GaussianCorrelated { u0, .. } | DisorderSpec::LorentzCorrelated { u0, .. } => Some(u0),
        }
    }

    /// Curvature `|h''(0)|` of the normalized correlator shape, when smooth at the origin.
    pub fn shape_curvature(&self) -> Option<f64> {
        match self {
            DisorderSpec::GaussianCorrelated { .. } => Some(1.0),
            DisorderSpec::LorentzCorrelated { .. } => Some(2.0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderClass {
    Uncorrelated,
    WeaklyCorrelated,
    StronglyCorrelated,
}

impl DisorderClass {
    pub fn name(&self) -> &'static str {
        match self {
            DisorderClass::Uncorrelated => "uncorrelated",
            DisorderClass::WeaklyCorrelated => "weakly correlated",
            DisorderClass::StronglyCorrelated => "strongly correlated",
        }
    }
}

/// Input parameters of a gas in a random potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    pub dimension: usize,
    pub disorder: DisorderSpec,
    #[serde(default)]
    pub scattering_length: Option<f64>,
    #[serde(default)]
    pub coupling_g: Option<f64>,
    #[serde(default)]
    pub mean_density: Option<f64>,
    #[serde(default)]
    pub particle_count: Option<f64>,
    #[serde(default)]
    pub trap_frequency: Option<f64>,
    #[serde(default)]
    pub transverse_frequency: Option<f64>,
}

/// The amount of gas: either a density or a total particle number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GasAmount {
    Density(f64),
    Count(f64),
}

impl PhysicalParams {
    /// Parameters in units with `ħ = m = 1` and no gas attached.
    pub fn natural(dimension: usize, disorder: DisorderSpec) -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            dimension,
            disorder,
            scattering_length: None,
            coupling_g: None,
            mean_density: None,
            particle_count: None,
            trap_frequency: None,
            transverse_frequency: None,
        }
    }

    pub fn with_scattering_length(mut self, a: f64) -> Self {
        self.scattering_length = Some(a);
        self
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.coupling_g = Some(g);
        self
    }

    pub fn with_density(mut self, n: f64) -> Self {
        self.mean_density = Some(n);
        self
    }

    pub fn with_particle_count(mut self, n: f64) -> Self {
        self.particle_count = Some(n);
        self
    }

    pub fn with_trap(mut self, omega: f64) -> Self {
        self.trap_frequency = Some(omega);
        self
    }

    pub fn with_transverse_trap(mut self, omega: f64) -> Self {
        self.transverse_frequency = Some(omega);
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_dimension(self.dimension)?;
        positive("hbar", self.hbar)?;
        positive("mass", self.mass)?;
        self.disorder.validate()?;
        let optional = [
            ("scattering_length", self.scattering_length),
            ("coupling_g", self.coupling_g),
            ("mean_density", self.mean_density),
            ("particle_count", self.particle_count),
            ("trap_frequency", self.trap_frequency),
            ("transverse_frequency", self.transverse_frequency),
        ];
        for (name, value) in optional {
            if let Some(v) = value {
                positive(name, v)?;
            }
        }
        Ok(())
    }

    /// Contact coupling `g_d`, taken verbatim when given, otherwise derived from `a`.
    pub fn coupling(&self) -> Result<f64> {
        if let Some(g) = self.coupling_g {
            return Ok(g);
        }
        let a = self.scattering_length.ok_or(Error::MissingParameter("coupling_g"))?;
        coupling_from_scattering_length(self.dimension, a, self.hbar, self.mass)
    }

    /// Exactly one of density and particle count must be set for gas computations.
    pub fn gas_amount(&self) -> Result<GasAmount> {
        match (self.mean_density, self.particle_count) {
            (Some(n), None) => Ok(GasAmount::Density(n)),
            (None, Some(n)) => Ok(GasAmount::Count(n)),
            (None, None) => Err(Error::MissingParameter("mean_density or particle_count")),
            (Some(_), Some(_)) => Err(Error::InvalidInput(
                "set exactly one of mean_density and particle_count".into(),
            )),
        }
    }
}

/// `g_3 = 4πħ²a/m`, `g_1 = Ω_1 ħ²/(m a_1)`; undefined in two dimensions.
pub fn coupling_from_scattering_length(d: usize, a: f64, hbar: f64, mass: f64) -> Result<f64> {
    positive("scattering_length", a)?;
    match d {
        3 => Ok(4.0 * PI * hbar * hbar * a / mass),
        1 => Ok(OMEGA_1 * hbar * hbar / (mass * a)),
        2 => Err(Error::MissingParameter("coupling_g")),
        _ => Err(Error::InvalidDimension(d)),
    }
}

/// Inverse of [`coupling_from_scattering_length`].
pub fn scattering_length_from_coupling(d: usize, g: f64, hbar: f64, mass: f64) -> Result<f64> {
    positive("coupling_g", g)?;
    match d {
        3 => Ok(g * mass / (4.0 * PI * hbar * hbar)),
        1 => Ok(OMEGA_1 * hbar * hbar / (mass * g)),
        2 => Err(Error::MissingParameter("scattering_length")),
        _ => Err(Error::InvalidDimension(d)),
    }
}

/// Characteristic scales of a parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    pub dimension: usize,
    pub hbar: f64,
    pub mass: f64,
    pub disorder: DisorderSpec,
    pub larkin_length: f64,
    pub larkin_energy: f64,
    pub quantum_length: Option<f64>,
    pub healing_length: Option<f64>,
    pub oscillator_length: Option<f64>,
    pub transverse_oscillator_length: Option<f64>,
    pub critical_density: Option<f64>,
    pub disorder_class: DisorderClass,
    pub coupling_g: Option<f64>,
}

impl Scales {
    /// Critical density, or `MissingParameter` when no coupling was available.
    pub fn n_c(&self) -> Result<f64> {
        self.critical_density.ok_or(Error::MissingParameter("coupling_g"))
    }

    pub fn coupling(&self) -> Result<f64> {
        self.coupling_g.ok_or(Error::MissingParameter("coupling_g"))
    }

    /// `B`, or an error for delta-correlated disorder.
    pub fn b_length(&self) -> Result<f64> {
        self.quantum_length.ok_or(Error::WrongDisorderClass {
            expected: "correlated",
            found: self.disorder_class.name(),
        })
    }
}

/// `L_d = (ħ⁴/(m²κ²))^{1/(4−d)}`.
pub fn larkin_length_uncorrelated(d: usize, hbar: f64, mass: f64, kappa: f64) -> f64 {
    (hbar.powi(4) / (mass * mass * kappa * kappa)).powf(1.0 / (4.0 - d as f64))
}

/// `B = (3/4π)^{1/4} (ħ²/(m U0))^{1/2}`.
pub fn quantum_length(hbar: f64, mass: f64, u0: f64) -> f64 {
    (3.0 / (4.0 * PI)).powf(0.25) * (hbar * hbar / (mass * u0)).sqrt()
}

/// Larkin length of finite-range disorder, `L_d^{4−d} = B⁴/b^d`; at `d = 3` this is
/// `3ħ⁴/(4π m² U0² b³)`.
pub fn larkin_length_correlated(d: usize, hbar: f64, mass: f64, u0: f64, b: f64) -> f64 {
    let big_b = quantum_length(hbar, mass, u0);
    (big_b.powi(4) / b.powi(d as i32)).powf(1.0 / (4.0 - d as f64))
}

/// `E_d = ħ²/(2 m L_d²)`.
pub fn larkin_energy(hbar: f64, mass: f64, larkin_length: f64) -> f64 {
    hbar * hbar / (2.0 * mass * larkin_length * larkin_length)
}

/// Uncorrelated critical density `n_c = Ω_d ħ²/(m g L_d² (4−d))`.
pub fn critical_density_uncorrelated(d: usize, hbar: f64, mass: f64, g: f64, larkin_length: f64) -> Result<f64> {
    let omega = unit_ball_volume(d)?;
    Ok(omega * hbar * hbar / (mass * g * larkin_length * larkin_length * (4.0 - d as f64)))
}

/// Three-dimensional closed form `n_c = 1/(3 L² a)`.
pub fn critical_density_three_dim(larkin_length: f64, a: f64) -> f64 {
    1.0 / (3.0 * larkin_length * larkin_length * a)
}

/// Strongly correlated critical density: `(√3/4) m U0/(ħ² a)` in three dimensions
/// (written through `g`), `(Ω_d/d) U0/g_d` below.
pub fn critical_density_correlated(d: usize, u0: f64, g: f64) -> Result<f64> {
    match d {
        3 => Ok(3f64.sqrt() * PI * u0 / g),
        1 | 2 => Ok(unit_ball_volume(d)? / d as f64 * u0 / g),
        _ => Err(Error::InvalidDimension(d)),
    }
}

pub fn oscillator_length(hbar: f64, mass: f64, omega: f64) -> f64 {
    (hbar / (mass * omega)).sqrt()
}

pub fn healing_length(hbar: f64, mass: f64, g: f64, n: f64) -> f64 {
    hbar / (2.0 * mass * g * n).sqrt()
}

pub fn derive_scales(params: &PhysicalParams) -> Result<Scales> {
    params.validate()?;
    let d = params.dimension;
    let (hbar, mass) = (params.hbar, params.mass);
    let spec = params.disorder;

    let (larkin_length, quantum_length) = match spec {
        DisorderSpec::Uncorrelated { kappa } => (larkin_length_uncorrelated(d, hbar, mass, kappa), None),
        DisorderSpec::OrnsteinZernike { kappa, .. } => {
            let u0 = spec.amplitude(d).expect("correlated spec has an amplitude");
            (larkin_length_uncorrelated(d, hbar, mass, kappa), Some(self::quantum_length(hbar, mass, u0)))
        }
        DisorderSpec::GaussianCorrelated { u0, b } | DisorderSpec::LorentzCorrelated { u0, b } => (
            larkin_length_correlated(d, hbar, mass, u0, b),
            Some(self::quantum_length(hbar, mass, u0)),
        ),
    };
    let disorder_class = match spec.correlation_length() {
        None => DisorderClass::Uncorrelated,
        Some(b) if b > larkin_length => DisorderClass::StronglyCorrelated,
        Some(_) => DisorderClass::WeaklyCorrelated,
    };

    let coupling_g = match params.coupling() {
        Ok(g) => Some(g),
        Err(Error::MissingParameter(_)) => None,
        Err(e) => return Err(e),
    };
    let critical_density = match coupling_g {
        None => None,
        Some(g) => Some(match disorder_class {
            DisorderClass::StronglyCorrelated => {
                critical_density_correlated(d, spec.amplitude(d).expect("correlated"), g)?
            }
            _ => critical_density_uncorrelated(d, hbar, mass, g, larkin_length)?,
        }),
    };
    let healing_length = match (coupling_g, params.mean_density) {
        (Some(g), Some(n)) => Some(self::healing_length(hbar, mass, g, n)),
        _ => None,
    };

    Ok(Scales {
        dimension: d,
        hbar,
        mass,
        disorder: spec,
        larkin_length,
        larkin_energy: larkin_energy(hbar, mass, larkin_length),
        quantum_length,
        healing_length,
        oscillator_length: params.trap_frequency.map(|w| oscillator_length(hbar, mass, w)),
        transverse_oscillator_length: params.transverse_frequency.map(|w| oscillator_length(hbar, mass, w)),
        critical_density,
        disorder_class,
        coupling_g,
    })
}

/// Effective lower-dimensional parameters of a gas frozen into the transverse
/// oscillator ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedParams {
    pub params: PhysicalParams,
    /// `a_d`, reported for `d = 1` only; the coupling carried by `params` is authoritative.
    pub reduced_scattering_length: Option<f64>,
    pub warnings: Vec<DomainWarning>,
}

/// Maps a three-dimensional parameter set onto `target_d` dimensions.
///
/// `κ_d² = κ²/ℓ⊥^{3−d}` so that `L_d = (L ℓ⊥^{3−d})^{1/(4−d)}`, `g_d = g ℓ⊥^{d−3}/Ω_{3−d}`
/// and `n_d = n Ω_{3−d} ℓ⊥^{3−d}`, which keeps `n g = n_d g_d`.
pub fn reduced_dimension_map(params3d: &PhysicalParams, omega_perp: f64, target_d: usize) -> Result<ReducedParams> {
    params3d.validate()?;
    if params3d.dimension != 3 {
        return Err(Error::InvalidDimension(params3d.dimension));
    }
    check_dimension(target_d)?;
    positive("transverse_frequency", omega_perp)?;
    if target_d == 3 {
        return Ok(ReducedParams { params: params3d.clone(), reduced_scattering_length: None, warnings: Vec::new() });
    }

    let (hbar, mass) = (params3d.hbar, params3d.mass);
    let l_perp = oscillator_length(hbar, mass, omega_perp);
    let codim = (3 - target_d) as i32;
    let omega_codim = unit_ball_volume(3 - target_d)?;
    let squeeze = l_perp.powi(codim);

    let disorder = match params3d.disorder {
        DisorderSpec::Uncorrelated { kappa } => DisorderSpec::Uncorrelated { kappa: kappa / squeeze.sqrt() },
        DisorderSpec::OrnsteinZernike { kappa, b } => DisorderSpec::OrnsteinZernike { kappa: kappa / squeeze.sqrt(), b },
        other => other,
    };

    let mut warnings = Vec::new();
    let scales3 = derive_scales(params3d)?;
    let g3 = scales3.coupling_g;
    let a3 = params3d
        .scattering_length
        .or_else(|| g3.and_then(|g| scattering_length_from_coupling(3, g, hbar, mass).ok()));
    if let Some(a) = a3 {
        if a > MUCH_LESS * l_perp {
            warnings.push(DomainWarning::new(
                WarningCode::OutsideReducedWindow,
                format!("scattering length {a} is not much smaller than the transverse length {l_perp}"),
            ));
        }
    }
    if l_perp > MUCH_LESS * scales3.larkin_length {
        warnings.push(DomainWarning::new(
            WarningCode::OutsideReducedWindow,
            format!("transverse length {l_perp} is not much smaller than the Larkin length {}", scales3.larkin_length),
        ));
    }

    let coupling_g = g3.map(|g| g / (squeeze * omega_codim));
    let reduced_scattering_length = match (target_d, a3) {
        (1, Some(a)) => Some((a / squeeze).powf(1.0 / (target_d as f64 - 2.0))),
        _ => None,
    };

    let params = PhysicalParams {
        hbar,
        mass,
        dimension: target_d,
        disorder,
        scattering_length: None,
        coupling_g,
        mean_density: params3d.mean_density.map(|n| n * omega_codim * squeeze),
        particle_count: params3d.particle_count,
        trap_frequency: params3d.trap_frequency,
        transverse_frequency: Some(omega_perp),
    };
    Ok(ReducedParams { params, reduced_scattering_length, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit3() -> PhysicalParams {
        PhysicalParams::natural(3, DisorderSpec::Uncorrelated { kappa: 1.0 }).with_scattering_length(1.0)
    }

    #[test]
    fn identity_units_three_dim() {
        let s = derive_scales(&unit3()).unwrap();
        assert_relative_eq!(s.larkin_length, 1.0);
        assert_relative_eq!(s.larkin_energy, 0.5);
        assert_relative_eq!(s.n_c().unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_eq!(s.disorder_class, DisorderClass::Uncorrelated);
    }

    #[test]
    fn identity_units_one_dim() {
        let s = derive_scales(&PhysicalParams::natural(1, DisorderSpec::Uncorrelated { kappa: 1.0 })).unwrap();
        assert_relative_eq!(s.larkin_length, 1.0);
        assert_relative_eq!(s.larkin_energy, 0.5);
        assert!(s.critical_density.is_none());
        assert!(matches!(s.n_c(), Err(Error::MissingParameter(_))));
    }

    #[test]
    fn stronger_disorder_shrinks_larkin_length() {
        let p = PhysicalParams::natural(3, DisorderSpec::Uncorrelated { kappa: 2.0 }).with_scattering_length(1.0);
        let s = derive_scales(&p).unwrap();
        assert_relative_eq!(s.larkin_length, 0.25, max_relative = 1e-15);
        assert_relative_eq!(s.n_c().unwrap(), 16.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn two_dim_needs_explicit_coupling() {
        let p = PhysicalParams::natural(2, DisorderSpec::Uncorrelated { kappa: 1.0 }).with_scattering_length(0.1);
        let s = derive_scales(&p).unwrap();
        assert!(matches!(s.n_c(), Err(Error::MissingParameter("coupling_g"))));
        let s = derive_scales(&p.with_coupling(0.5)).unwrap();
        assert_relative_eq!(s.n_c().unwrap(), PI / (0.5 * 2.0), max_relative = 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut p = unit3();
        p.mass = 0.0;
        assert!(matches!(derive_scales(&p), Err(Error::NonPositiveInput { name: "mass", .. })));
        let p = PhysicalParams::natural(4, DisorderSpec::Uncorrelated { kappa: 1.0 });
        assert!(matches!(derive_scales(&p), Err(Error::InvalidDimension(4))));
        let p = PhysicalParams::natural(3, DisorderSpec::GaussianCorrelated { u0: 1.0, b: -1.0 });
        assert!(derive_scales(&p).is_err());
    }

    #[test]
    fn gas_amount_requires_exactly_one() {
        let p = unit3();
        assert!(p.gas_amount().is_err());
        assert_eq!(p.clone().with_density(2.0).gas_amount().unwrap(), GasAmount::Density(2.0));
        assert!(p.with_density(1.0).with_particle_count(3.0).gas_amount().is_err());
    }

    #[test]
    fn correlated_larkin_length_matches_closed_form() {
        let (u0, b) = (0.7, 3.0);
        let p = PhysicalParams::natural(3, DisorderSpec::GaussianCorrelated { u0, b }).with_scattering_length(0.01);
        let s = derive_scales(&p).unwrap();
        assert_relative_eq!(s.larkin_length, 3.0 / (4.0 * PI * u0 * u0 * b.powi(3)), max_relative = 1e-13);
        assert_eq!(s.disorder_class, DisorderClass::StronglyCorrelated);
        let big_b = s.quantum_length.unwrap();
        assert!(b > big_b);
        // n_c b³ ≈ b³/(B² a) up to the fixed constant
        let ratio = s.n_c().unwrap() * b.powi(3) / (b.powi(3) / (big_b * big_b * 0.01));
        assert_relative_eq!(ratio, 3f64.sqrt() / 4.0 * (3.0 / (4.0 * PI)).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn weakly_correlated_below_larkin_length() {
        let p = PhysicalParams::natural(3, DisorderSpec::GaussianCorrelated { u0: 0.01, b: 0.5 });
        let s = derive_scales(&p).unwrap();
        assert_eq!(s.disorder_class, DisorderClass::WeaklyCorrelated);
        assert!(s.quantum_length.unwrap() > 0.5);
    }

    #[test]
    fn reduced_map_to_one_dimension() {
        let p = PhysicalParams::natural(3, DisorderSpec::Uncorrelated { kappa: 0.01 }).with_scattering_length(0.01);
        let s3 = derive_scales(&p).unwrap();
        assert_relative_eq!(s3.larkin_length, 1e4, max_relative = 1e-12);
        let r = reduced_dimension_map(&p, 1.0, 1).unwrap();
        let s1 = derive_scales(&r.params).unwrap();
        assert_relative_eq!(s1.larkin_length, (1e4f64).powf(1.0 / 3.0), max_relative = 1e-13);
        assert_relative_eq!(r.reduced_scattering_length.unwrap(), 100.0, max_relative = 1e-13);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn reduced_map_larkin_example() {
        // L = 100 with ħ = m = 1 needs κ = 0.1.
        let p = PhysicalParams::natural(3, DisorderSpec::Uncorrelated { kappa: 0.1 });
        let r = reduced_dimension_map(&p, 1.0, 1).unwrap();
        let s1 = derive_scales(&r.params).unwrap();
        assert_relative_eq!(s1.larkin_length, 4.641588833612779, max_relative = 1e-13);
    }

    #[test]
    fn reduced_map_preserves_mean_field_energy() {
        let p = PhysicalParams::natural(3, DisorderSpec::Uncorrelated { kappa: 0.01 })
            .with_scattering_length(0.02)
            .with_density(3.5);
        for d in [1, 2] {
            let r = reduced_dimension_map(&p, 0.7, d).unwrap();
            let ng = 3.5 * p.coupling().unwrap();
            let nd_gd = r.params.mean_density.unwrap() * r.params.coupling().unwrap();
            assert_relative_eq!(ng, nd_gd, max_relative = 1e-14);
        }
    }

    #[test]
    fn reduced_map_rejects_bad_dimension() {
        let p = unit3();
        assert!(matches!(reduced_dimension_map(&p, 1.0, 0), Err(Error::InvalidDimension(0))));
        let p1 = PhysicalParams::natural(1, DisorderSpec::Uncorrelated { kappa: 1.0 });
        assert!(matches!(reduced_dimension_map(&p1, 1.0, 1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn reduced_map_warns_outside_window() {
        let r = reduced_dimension_map(&unit3(), 1.0, 1).unwrap();
        assert_eq!(r.warnings.len(), 2);
    }
}
