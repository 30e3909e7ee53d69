//! Unit-tagged quantities such as `"0.5 um"` or `"2 kHz"`, converted to natural units in
//! which `ħ = m = 1` and lengths are measured in a configured reference length.

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const HBAR_SI: f64 = 1.054_571_817e-34;
pub const ATOMIC_MASS_SI: f64 = 1.660_539_066_60e-27;

/// Exponents of mass, length and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimension {
    pub mass: f64,
    pub length: f64,
    pub time: f64,
}

impl Dimension {
    pub const NONE: Self = Self::new(0.0, 0.0, 0.0);
    pub const LENGTH: Self = Self::new(0.0, 1.0, 0.0);
    pub const TIME: Self = Self::new(0.0, 0.0, 1.0);
    pub const MASS: Self = Self::new(1.0, 0.0, 0.0);
    pub const FREQUENCY: Self = Self::new(0.0, 0.0, -1.0);
    pub const ENERGY: Self = Self::new(1.0, 2.0, -2.0);

    pub const fn new(mass: f64, length: f64, time: f64) -> Self {
        Self { mass, length, time }
    }

    /// `length^{-d}`.
    pub fn density(d: usize) -> Self {
        Self::new(0.0, -(d as f64), 0.0)
    }

    /// Coupling `g`: energy times `length^d`.
    pub fn coupling(d: usize) -> Self {
        Self::new(1.0, 2.0 + d as f64, -2.0)
    }

    /// `κ`: energy times `length^{d/2}`.
    pub fn kappa(d: usize) -> Self {
        Self::new(1.0, 2.0 + d as f64 / 2.0, -2.0)
    }

    fn scaled(self, p: f64) -> Self {
        Self::new(self.mass * p, self.length * p, self.time * p)
    }

    fn plus(self, o: Self) -> Self {
        Self::new(self.mass + o.mass, self.length + o.length, self.time + o.time)
    }

    fn approx_eq(&self, o: &Self) -> bool {
        (self.mass - o.mass).abs() < 1e-12 && (self.length - o.length).abs() < 1e-12 && (self.time - o.time).abs() < 1e-12
    }
}

/// SI factor and dimension of a base unit symbol.
fn base_unit(symbol: &str) -> Option<(f64, Dimension)> {
    use std::f64::consts::PI;
    let d = match symbol {
        "m" => (1.0, Dimension::LENGTH),
        "mm" => (1e-3, Dimension::LENGTH),
        "um" | "μm" => (1e-6, Dimension::LENGTH),
        "nm" => (1e-9, Dimension::LENGTH),
        "s" => (1.0, Dimension::TIME),
        "ms" => (1e-3, Dimension::TIME),
        "us" | "μs" => (1e-6, Dimension::TIME),
        "kg" => (1.0, Dimension::MASS),
        "u" | "amu" => (ATOMIC_MASS_SI, Dimension::MASS),
        // cyclic frequencies; angular frequency ω = 2πf
        "Hz" => (2.0 * PI, Dimension::FREQUENCY),
        "kHz" => (2e3 * PI, Dimension::FREQUENCY),
        "rad/s" => (1.0, Dimension::FREQUENCY),
        "J" => (1.0, Dimension::ENERGY),
        "K" => (1.380_649e-23, Dimension::ENERGY),
        "nK" => (1.380_649e-32, Dimension::ENERGY),
        _ => return None,
    };
    Some(d)
}

/// Reference scales of the natural unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    /// Reference length in metres.
    pub length_si: f64,
    /// Particle mass in kilograms.
    pub mass_si: f64,
}

impl Default for UnitSystem {
    /// Rubidium-87 and one micrometre.
    fn default() -> Self {
        Self { length_si: 1e-6, mass_si: 86.909_180_527 * ATOMIC_MASS_SI }
    }
}

impl UnitSystem {
    /// `m L²/ħ` in seconds.
    pub fn time_si(&self) -> f64 {
        self.mass_si * self.length_si * self.length_si / HBAR_SI
    }

    pub fn energy_si(&self) -> f64 {
        HBAR_SI / self.time_si()
    }

    fn si_scale(&self, dim: Dimension) -> f64 {
        self.mass_si.powf(dim.mass) * self.length_si.powf(dim.length) * self.time_si().powf(dim.time)
    }

    /// Parses `"<value> <unit expression>"` and returns the value in natural units.
    /// The tag `nat` marks a value that is already natural; dimensionless values may omit
    /// the tag.
    pub fn parse(&self, text: &str, expected: Dimension, field: &str) -> Result<f64> {
        let text = text.trim();
        let (number, unit) = match text.split_once(char::is_whitespace) {
            Some((n, u)) => (n, u.trim()),
            None if expected.approx_eq(&Dimension::NONE) => (text, "nat"),
            None => {
                return Err(HarnessError::Validation(format!("{field}: `{text}` needs a unit tag (use `nat` for natural units)")))
            }
        };
        let value: f64 = number
            .parse()
            .map_err(|_| HarnessError::Validation(format!("{field}: `{number}` is not a number")))?;
        if !value.is_finite() {
            return Err(HarnessError::Validation(format!("{field}: value must be finite")));
        }
        if unit == "nat" {
            return Ok(value);
        }
        let (factor, dim) = parse_unit(unit).ok_or_else(|| {
            HarnessError::Validation(format!("{field}: unknown unit expression `{unit}`"))
        })?;
        if !dim.approx_eq(&expected) {
            return Err(HarnessError::Validation(format!(
                "{field}: `{unit}` has dimension M^{} L^{} T^{}, expected M^{} L^{} T^{}",
                dim.mass, dim.length, dim.time, expected.mass, expected.length, expected.time
            )));
        }
        Ok(value * factor / self.si_scale(dim))
    }
}

/// Product of `symbol` or `symbol^power` factors separated by spaces or `*`; a single
/// `/` divides by everything after it.
fn parse_unit(expr: &str) -> Option<(f64, Dimension)> {
    if let Some(f) = base_unit(expr) {
        return Some(f);
    }
    let (num, den) = match expr.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (expr, None),
    };
    let mut factor = 1.0;
    let mut dim = Dimension::NONE;
    let mut apply = |part: &str, sign: f64| -> Option<()> {
        for token in part.split(|c: char| c == '*' || c.is_whitespace()).filter(|t| !t.is_empty() && *t != "1") {
            let (sym, power) = match token.split_once('^') {
                Some((s, p)) => (s, p.parse::<f64>().ok()?),
                None => (token, 1.0),
            };
            let (f, d) = base_unit(sym)?;
            factor *= f.powf(sign * power);
            dim = dim.plus(d.scaled(sign * power));
        }
        Some(())
    };
    apply(num, 1.0)?;
    if let Some(den) = den {
        apply(den, -1.0)?;
    }
    Some((factor, dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_length_is_one() {
        let u = UnitSystem::default();
        assert_relative_eq!(u.parse("1 um", Dimension::LENGTH, "x").unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(u.parse("250 nm", Dimension::LENGTH, "x").unwrap(), 0.25, max_relative = 1e-14);
        assert_eq!(u.parse("3.5 nat", Dimension::LENGTH, "x").unwrap(), 3.5);
    }

    #[test]
    fn frequencies_and_densities() {
        let u = UnitSystem::default();
        let t = u.time_si();
        assert_relative_eq!(
            u.parse("100 Hz", Dimension::FREQUENCY, "w").unwrap(),
            2.0 * std::f64::consts::PI * 100.0 * t,
            max_relative = 1e-14
        );
        assert_relative_eq!(u.parse("2 um^-3", Dimension::density(3), "n").unwrap(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(u.parse("2 1/um^3", Dimension::density(3), "n").unwrap(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(u.parse("1e-6 m", Dimension::LENGTH, "x").unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn energy_round_trip() {
        let u = UnitSystem::default();
        let e = u.energy_si();
        assert_relative_eq!(u.parse(&format!("{e} J"), Dimension::ENERGY, "e").unwrap(), 1.0, max_relative = 1e-12);
        let g = u.parse(&format!("{} J um^3", e), Dimension::coupling(3), "g").unwrap();
        assert_relative_eq!(g, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_wrong_dimension_and_missing_tags() {
        let u = UnitSystem::default();
        let err = u.parse("3 s", Dimension::LENGTH, "grid.spacing").unwrap_err().to_string();
        assert!(err.contains("grid.spacing"));
        assert!(u.parse("3", Dimension::LENGTH, "x").is_err());
        assert_eq!(u.parse("3", Dimension::NONE, "x").unwrap(), 3.0);
        assert!(u.parse("3 furlong", Dimension::LENGTH, "x").is_err());
    }
}
