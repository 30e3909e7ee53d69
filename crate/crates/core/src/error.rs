use thiserror::Error;

use crate::spectrum::EigenSet;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),
    #[error("`{name}` must be strictly positive and finite, got {value}")]
    NonPositiveInput { name: &'static str, value: f64 },
    #[error("unsupported dimension {0}")]
    InvalidDimension(usize),
    #[error("well radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("density {n} is not below the critical density {n_c}")]
    DensityAboveCritical { n: f64, n_c: f64 },
    #[error("density {n} is not above the critical density {n_c}")]
    BelowCritical { n: f64, n_c: f64 },
    #[error("level energy must be negative, got {0}")]
    NonNegativeEnergy(f64),
    #[error("well frequency must be positive")]
    ZeroFrequency,
    #[error("operation requires {expected} disorder, found {found}")]
    WrongDisorderClass { expected: &'static str, found: &'static str },
    #[error("trap frequency is required")]
    MissingTrap,
    #[error("the correction diverges in one dimension")]
    DivergentInOneDimension,
    #[error("temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),
    #[error("regime parameter must exceed one, got {0}")]
    GammaNotAboveOne(f64),
    #[error("Luttinger analysis needs a one-dimensional gas, got d = {0}")]
    OutsideOneDimension(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid spacing {spacing} exceeds half the correlation length {b}")]
    GridTooCoarse { spacing: f64, b: f64 },
    #[error("spectral synthesis needs periodic axes")]
    NonPeriodicGrid,
    #[error("need at least {required} realizations, got {got}")]
    InsufficientEnsemble { required: usize, got: usize },
    #[error("inverse transform left an imaginary residue of {0:e} relative to the field norm")]
    ImaginaryResidue(f64),

    #[error("field shape does not match the operator grid")]
    ShapeMismatch,
    #[error("eigensolver stopped after {iterations} iterations with residual {max_residual:e}")]
    NoConvergence { iterations: usize, max_residual: f64, best: Box<EigenSet> },
    #[error("tail window too narrow: {0}")]
    WindowTooNarrow(String),
    #[error("ensemble of {0} realizations is below the minimum of 100")]
    EnsembleTooSmall(usize),
    #[error("mode norm is {0}, expected 1")]
    UnnormalizedInput(f64),

    #[error("energy increased at iteration {iteration} after exhausting backtracking")]
    StepUnstable { iteration: usize },
    #[error("ground state not converged after {iterations} iterations (residual {residual:e}, relative energy change {energy_change:e})")]
    FlowNoConvergence { iterations: usize, residual: f64, energy_change: f64 },
    #[error("Thomas-Fermi profile needs a harmonic trap")]
    NoTrap,
    #[error("density has a negative value {0}")]
    NegativeDensity(f64),
    #[error("insufficient sweep: {0}")]
    InsufficientSweep(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositiveInput { name, value })
    }
}
