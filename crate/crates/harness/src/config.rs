//! Run configuration: a TOML file whose physical quantities carry unit tags. Everything
//! is converted to natural units (`ħ = m = 1`, lengths in the reference length) on load.

use std::path::Path;

use dirty_bosons::analytic::PrefactorMode;
use dirty_bosons::{DisorderSpec, Grid, PhysicalParams};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::units::{Dimension, UnitSystem};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawUnits {
    pub length: Option<String>,
    pub mass: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDisorder {
    pub kind: String,
    pub kappa: Option<String>,
    pub u0: Option<String>,
    pub b: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPhysics {
    pub dimension: usize,
    pub disorder: RawDisorder,
    pub scattering_length: Option<String>,
    pub coupling_g: Option<String>,
    pub mean_density: Option<String>,
    pub particle_count: Option<f64>,
    pub trap_frequency: Option<String>,
    pub transverse_frequency: Option<String>,
    pub temperature: Option<String>,
    /// `unity`, `cardy` or a number used as the prefactor exponent.
    pub prefactor: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Points {
    Cubic(usize),
    PerAxis(Vec<usize>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub points: Points,
    pub spacing: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEnsemble {
    pub realizations: Option<usize>,
    pub levels: Option<usize>,
    pub stream: Option<u64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGpe {
    pub particle_count: Option<f64>,
    pub starts: Option<usize>,
    pub residual_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFragments {
    /// `relative`, `absolute` or `mu_level`.
    pub threshold: Option<String>,
    pub epsilon: Option<f64>,
    pub level: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLogSpace {
    pub from: String,
    pub to: String,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAxis {
    pub parameter: String,
    pub values: Option<Vec<String>>,
    pub log_space: Option<RawLogSpace>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub units: RawUnits,
    pub physics: RawPhysics,
    pub grid: Option<RawGrid>,
    #[serde(default)]
    pub ensemble: RawEnsemble,
    #[serde(default)]
    pub gpe: RawGpe,
    #[serde(default)]
    pub fragments: RawFragments,
    #[serde(default)]
    pub sweep: Vec<RawAxis>,
}

/// Parameters a sweep axis can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    MeanDensity,
    /// `n/n_c`, dimensionless.
    DensityRatio,
    ParticleCount,
    ScatteringLength,
    CouplingG,
    TrapFrequency,
    Kappa,
    U0,
    CorrelationLength,
}

impl SweepParameter {
    pub const ALL: [&'static str; 9] = [
        "mean_density",
        "density_ratio",
        "particle_count",
        "scattering_length",
        "coupling_g",
        "trap_frequency",
        "kappa",
        "u0",
        "b",
    ];

    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "mean_density" => Self::MeanDensity,
            "density_ratio" => Self::DensityRatio,
            "particle_count" => Self::ParticleCount,
            "scattering_length" => Self::ScatteringLength,
            "coupling_g" => Self::CouplingG,
            "trap_frequency" => Self::TrapFrequency,
            "kappa" => Self::Kappa,
            "u0" => Self::U0,
            "b" => Self::CorrelationLength,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        Self::ALL[*self as usize]
    }

    fn dimension(&self, d: usize) -> Dimension {
        match self {
            Self::MeanDensity => Dimension::density(d),
            Self::DensityRatio | Self::ParticleCount => Dimension::NONE,
            Self::ScatteringLength | Self::CorrelationLength => Dimension::LENGTH,
            Self::CouplingG => Dimension::coupling(d),
            Self::TrapFrequency => Dimension::FREQUENCY,
            Self::Kappa => Dimension::kappa(d),
            Self::U0 => Dimension::ENERGY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub parameter: SweepParameter,
    /// Natural units.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum ThresholdChoice {
    Relative { epsilon: f64 },
    Absolute { level: f64 },
    MuLevel { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSettings {
    pub realizations: usize,
    pub levels: usize,
    pub stream: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpeSettings {
    pub particle_count: Option<f64>,
    pub starts: usize,
    pub residual_tol: Option<f64>,
}

/// A validated configuration in natural units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub units: UnitSystem,
    pub params: PhysicalParams,
    pub prefactor: PrefactorMode,
    pub temperature: Option<f64>,
    pub grid: Option<Grid>,
    pub ensemble: EnsembleSettings,
    pub gpe: GpeSettings,
    pub threshold: ThresholdChoice,
    pub sweep: Vec<SweepAxis>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<(Self, RawConfig)> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<(Self, RawConfig)> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| HarnessError::Validation(e.to_string()))?;
        Ok((Self::resolve(&raw)?, raw))
    }

    pub fn resolve(raw: &RawConfig) -> Result<Self> {
        let mut units = UnitSystem::default();
        if let Some(l) = &raw.units.length {
            units.length_si = UnitSystem { length_si: 1.0, mass_si: 1.0 }.parse(l, Dimension::LENGTH, "units.length")?;
        }
        if let Some(m) = &raw.units.mass {
            units.mass_si = UnitSystem { length_si: 1.0, mass_si: 1.0 }.parse(m, Dimension::MASS, "units.mass")?;
        }
        if !(units.length_si > 0.0 && units.mass_si > 0.0) {
            return Err(HarnessError::Validation("units: reference length and mass must be positive".into()));
        }
        let p = &raw.physics;
        let d = p.dimension;
        if !(1..=3).contains(&d) {
            return Err(HarnessError::Validation(format!("physics.dimension: must be 1, 2 or 3, got {d}")));
        }
        let q = |text: &Option<String>, dim: Dimension, field: &str| -> Result<Option<f64>> {
            text.as_deref().map(|t| units.parse(t, dim, field)).transpose()
        };
        let need = |text: &Option<String>, dim: Dimension, field: &str| -> Result<f64> {
            q(text, dim, field)?.ok_or_else(|| HarnessError::Validation(format!("{field}: required for this disorder kind")))
        };
        let dis = &p.disorder;
        let disorder = match dis.kind.as_str() {
            "uncorrelated" => DisorderSpec::Uncorrelated { kappa: need(&dis.kappa, Dimension::kappa(d), "physics.disorder.kappa")? },
            "ornstein_zernike" => DisorderSpec::OrnsteinZernike {
                kappa: need(&dis.kappa, Dimension::kappa(d), "physics.disorder.kappa")?,
                b: need(&dis.b, Dimension::LENGTH, "physics.disorder.b")?,
            },
            "gaussian" => DisorderSpec::GaussianCorrelated {
                u0: need(&dis.u0, Dimension::ENERGY, "physics.disorder.u0")?,
                b: need(&dis.b, Dimension::LENGTH, "physics.disorder.b")?,
            },
            "lorentz" => DisorderSpec::LorentzCorrelated {
                u0: need(&dis.u0, Dimension::ENERGY, "physics.disorder.u0")?,
                b: need(&dis.b, Dimension::LENGTH, "physics.disorder.b")?,
            },
            other => {
                return Err(HarnessError::Validation(format!(
                    "physics.disorder.kind: unknown kind `{other}` (uncorrelated, ornstein_zernike, gaussian, lorentz)"
                )))
            }
        };
        let params = PhysicalParams {
            hbar: 1.0,
            mass: 1.0,
            dimension: d,
            disorder,
            scattering_length: q(&p.scattering_length, Dimension::LENGTH, "physics.scattering_length")?,
            coupling_g: q(&p.coupling_g, Dimension::coupling(d), "physics.coupling_g")?,
            mean_density: q(&p.mean_density, Dimension::density(d), "physics.mean_density")?,
            particle_count: p.particle_count,
            trap_frequency: q(&p.trap_frequency, Dimension::FREQUENCY, "physics.trap_frequency")?,
            transverse_frequency: q(&p.transverse_frequency, Dimension::FREQUENCY, "physics.transverse_frequency")?,
        };
        params.validate().map_err(|e| HarnessError::Validation(format!("physics: {e}")))?;
        let prefactor = match p.prefactor.as_deref() {
            None | Some("unity") => PrefactorMode::Unity,
            Some("cardy") => PrefactorMode::Cardy,
            Some(x) => PrefactorMode::Custom(
                x.parse().map_err(|_| HarnessError::Validation(format!("physics.prefactor: `{x}` is not unity, cardy or a number")))?,
            ),
        };
        let temperature = q(&p.temperature, Dimension::ENERGY, "physics.temperature")?;

        let grid = match &raw.grid {
            None => None,
            Some(g) => {
                let h = units.parse(&g.spacing, Dimension::LENGTH, "grid.spacing")?;
                let shape = match &g.points {
                    Points::Cubic(n) => vec![*n; d],
                    Points::PerAxis(v) if v.len() == d => v.clone(),
                    Points::PerAxis(v) => {
                        return Err(HarnessError::Validation(format!("grid.points: {} entries for dimension {d}", v.len())))
                    }
                };
                let grid = Grid::new(shape, vec![h; d]).map_err(|e| HarnessError::Validation(format!("grid: {e}")))?;
                Some(grid)
            }
        };

        let ensemble = EnsembleSettings {
            realizations: raw.ensemble.realizations.unwrap_or(1),
            levels: raw.ensemble.levels.unwrap_or(10),
            stream: raw.ensemble.stream.unwrap_or(0),
        };
        if ensemble.realizations == 0 || ensemble.levels == 0 {
            return Err(HarnessError::Validation("ensemble: realizations and levels must be positive".into()));
        }
        let gpe = GpeSettings {
            particle_count: raw.gpe.particle_count,
            starts: raw.gpe.starts.unwrap_or(5),
            residual_tol: raw.gpe.residual_tol,
        };
        if gpe.starts == 0 {
            return Err(HarnessError::Validation("gpe.starts: must be positive".into()));
        }
        let epsilon = raw.fragments.epsilon.unwrap_or(0.05);
        let threshold = match raw.fragments.threshold.as_deref() {
            None | Some("mu_level") => ThresholdChoice::MuLevel { epsilon },
            Some("relative") => ThresholdChoice::Relative { epsilon },
            Some("absolute") => ThresholdChoice::Absolute {
                level: need(&raw.fragments.level, Dimension::density(d), "fragments.level")?,
            },
            Some(other) => {
                return Err(HarnessError::Validation(format!(
                    "fragments.threshold: unknown policy `{other}` (relative, absolute, mu_level)"
                )))
            }
        };

        let mut sweep = Vec::new();
        for (i, axis) in raw.sweep.iter().enumerate() {
            let field = format!("sweep[{i}] ({})", axis.parameter);
            let parameter = SweepParameter::parse(&axis.parameter).ok_or_else(|| {
                HarnessError::Validation(format!(
                    "{field}: unknown parameter; valid parameters are {}",
                    SweepParameter::ALL.join(", ")
                ))
            })?;
            let dim = parameter.dimension(d);
            let values: Vec<f64> = match (&axis.values, &axis.log_space) {
                (Some(v), None) => v.iter().map(|t| units.parse(t, dim, &field)).collect::<Result<_>>()?,
                (None, Some(ls)) => {
                    let a = units.parse(&ls.from, dim, &field)?;
                    let b = units.parse(&ls.to, dim, &field)?;
                    if !(a > 0.0 && b > 0.0) {
                        return Err(HarnessError::Validation(format!("{field}: log_space bounds must be positive")));
                    }
                    let n = ls.points;
                    (0..n)
                        .map(|k| if n == 1 { a } else { a * (b / a).powf(k as f64 / (n - 1) as f64) })
                        .collect()
                }
                (Some(_), Some(_)) => {
                    return Err(HarnessError::Validation(format!("{field}: give either values or log_space")))
                }
                (None, None) => Vec::new(),
            };
            if values.is_empty() {
                return Err(HarnessError::Validation(format!("{field}: sweep axis `{}` has no values", axis.parameter)));
            }
            sweep.push(SweepAxis { parameter, values });
        }
        Ok(Self { units, params, prefactor, temperature, grid, ensemble, gpe, threshold, sweep })
    }

    pub fn require_grid(&self) -> Result<&Grid> {
        self.grid.as_ref().ok_or_else(|| HarnessError::Validation("grid: this command needs a [grid] section".into()))
    }
}

/// Applies one sweep value to a parameter set. `n_c` is needed for density ratios.
pub fn apply_axis(params: &PhysicalParams, parameter: SweepParameter, value: f64, n_c: Option<f64>) -> Result<PhysicalParams> {
    let mut p = params.clone();
    let bad_kind = || HarnessError::Validation(format!("sweep axis `{}` does not apply to {} disorder", parameter.name(), p.disorder.name()));
    match parameter {
        SweepParameter::MeanDensity => {
            p.mean_density = Some(value);
            p.particle_count = None;
        }
        SweepParameter::DensityRatio => {
            let n_c = n_c.ok_or_else(|| HarnessError::Validation("sweep axis `density_ratio` needs a coupling".into()))?;
            p.mean_density = Some(value * n_c);
            p.particle_count = None;
        }
        SweepParameter::ParticleCount => {
            p.particle_count = Some(value);
            p.mean_density = None;
        }
        SweepParameter::ScatteringLength => {
            p.scattering_length = Some(value);
            p.coupling_g = None;
        }
        SweepParameter::CouplingG => {
            p.coupling_g = Some(value);
            p.scattering_length = None;
        }
        SweepParameter::TrapFrequency => p.trap_frequency = Some(value),
        SweepParameter::Kappa => {
            p.disorder = match p.disorder {
                DisorderSpec::Uncorrelated { .. } => DisorderSpec::Uncorrelated { kappa: value },
                DisorderSpec::OrnsteinZernike { b, .. } => DisorderSpec::OrnsteinZernike { kappa: value, b },
                _ => return Err(bad_kind()),
            }
        }
        SweepParameter::U0 => {
            p.disorder = match p.disorder {
                DisorderSpec::GaussianCorrelated { b, .. } => DisorderSpec::GaussianCorrelated { u0: value, b },
                DisorderSpec::LorentzCorrelated { b, .. } => DisorderSpec::LorentzCorrelated { u0: value, b },
                _ => return Err(bad_kind()),
            }
        }
        SweepParameter::CorrelationLength => {
            p.disorder = match p.disorder {
                DisorderSpec::OrnsteinZernike { kappa, .. } => DisorderSpec::OrnsteinZernike { kappa, b: value },
                DisorderSpec::GaussianCorrelated { u0, .. } => DisorderSpec::GaussianCorrelated { u0, b: value },
                DisorderSpec::LorentzCorrelated { u0, .. } => DisorderSpec::LorentzCorrelated { u0, b: value },
                DisorderSpec::Uncorrelated { .. } => return Err(bad_kind()),
            }
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[units]
length = "1 um"
mass = "86.909 u"

[physics]
dimension = 1
disorder = { kind = "uncorrelated", kappa = "1 nat" }
coupling_g = "1 nat"

[grid]
points = 256
spacing = "0.0625 um"
"#;

    #[test]
    fn natural_units_pass_through() {
        let (cfg, _) = RunConfig::from_toml(BASE).unwrap();
        assert_eq!(cfg.params.disorder, DisorderSpec::Uncorrelated { kappa: 1.0 });
        assert_eq!(cfg.params.coupling_g, Some(1.0));
        let grid = cfg.grid.unwrap();
        assert_eq!(grid.shape, vec![256]);
        assert!((grid.spacing[0] - 0.0625).abs() < 1e-14);
    }

    #[test]
    fn empty_axis_is_named() {
        let text = format!("{BASE}\n[[sweep]]\nparameter = \"mean_density\"\nvalues = []\n");
        let err = RunConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("mean_density"), "{err}");
    }

    #[test]
    fn unknown_fields_and_units_are_rejected() {
        assert!(RunConfig::from_toml(&format!("{BASE}\n[extra]\nx = 1\n")).is_err());
        let bad = BASE.replace("0.0625 um", "0.0625 s");
        assert!(RunConfig::from_toml(&bad).unwrap_err().to_string().contains("grid.spacing"));
    }

    #[test]
    fn log_space_axis() {
        let text = format!(
            "{BASE}\n[[sweep]]\nparameter = \"density_ratio\"\nlog_space = {{ from = \"0.01\", to = \"0.1\", points = 10 }}\n"
        );
        let (cfg, _) = RunConfig::from_toml(&text).unwrap();
        let v = &cfg.sweep[0].values;
        assert_eq!(v.len(), 10);
        assert!((v[0] - 0.01).abs() < 1e-15 && (v[9] - 0.1).abs() < 1e-15);
    }
}
