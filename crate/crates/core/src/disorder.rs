//! Gaussian random potentials with prescribed correlators, synthesized spectrally on a
//! periodic lattice, and ensemble estimates of their correlation function.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::fft::{signed_frequency, NdFft};
use crate::grid::{Field, Grid};
use crate::scales::DisorderSpec;
use crate::stats;
use crate::warning::{DomainWarning, WarningCode};

/// Relative size of the imaginary part tolerated after the inverse transform.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// Smallest grid extent, in units of `b`, before a warning is raised.
pub const MIN_EXTENT_IN_B: f64 = 8.0;

/// Stream seed plus realization index; `(stream, realization)` fixes a field completely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub stream: u64,
    pub realization: u64,
}

impl Seed {
    pub fn new(stream: u64, realization: u64) -> Self {
        Self { stream, realization }
    }

    /// Independent ChaCha stream for this realization.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.stream);
        rng.set_stream(self.realization);
        rng
    }
}

/// Continuum spectral density `K̃(q)` in `d` dimensions.
pub fn correlator_spectrum(spec: &DisorderSpec, d: usize, q: f64) -> f64 {
    let q = q.abs();
    match *spec {
        DisorderSpec::Uncorrelated { kappa } => kappa * kappa,
        DisorderSpec::OrnsteinZernike { kappa, b } => kappa * kappa / (1.0 + b * b * q * q),
        DisorderSpec::GaussianCorrelated { u0, b } => {
            (2.0 * PI).powf(d as f64 / 2.0) * u0 * u0 * b.powi(d as i32) * (-0.5 * b * b * q * q).exp()
        }
        DisorderSpec::LorentzCorrelated { u0, b } => {
            let s = u0 * u0;
            match d {
                1 => PI * s * b * (-b * q).exp(),
                2 => 2.0 * PI * s * b * b * bessel_k0(b * q),
                _ => {
                    if q == 0.0 {
                        f64::INFINITY
                    } else {
                        2.0 * PI * PI * s * b * b * (-b * q).exp() / q
                    }
                }
            }
        }
    }
}

/// Continuum correlator `K(r)`; infinite at the origin where the continuum variance diverges.
pub fn correlator(spec: &DisorderSpec, d: usize, r: f64) -> f64 {
    let r = r.abs();
    match *spec {
        DisorderSpec::Uncorrelated { .. } => {
            if r == 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        }
        DisorderSpec::OrnsteinZernike { kappa, b } => {
            let k2 = kappa * kappa;
            match d {
                1 => k2 / (2.0 * b) * (-r / b).exp(),
                2 if r > 0.0 => k2 / (2.0 * PI * b * b) * bessel_k0(r / b),
                3 if r > 0.0 => k2 / (4.0 * PI * b * b * r) * (-r / b).exp(),
                _ => f64::INFINITY,
            }
        }
        DisorderSpec::GaussianCorrelated { u0, b } => u0 * u0 * (-0.5 * r * r / (b * b)).exp(),
        DisorderSpec::LorentzCorrelated { u0, b } => u0 * u0 / (1.0 + r * r / (b * b)),
    }
}

/// `K_0(x)` from `∫_0^∞ exp(−x cosh t) dt` by the trapezoidal rule, which converges
/// geometrically for this integrand.
pub fn bessel_k0(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    let t_max = (2.0 * (700.0 / x).max(1.0)).ln() + 1.0;
    let steps = 2000;
    let dt = t_max / steps as f64;
    let mut sum = 0.5 * ((-x).exp() + (-x * t_max.cosh()).exp());
    for i in 1..steps {
        sum += (-x * (i as f64 * dt).cosh()).exp();
    }
    sum * dt
}

/// Disorder frequency `ω_d = √(2U0/(m b²))`.
pub fn effective_disorder_frequency(u0: f64, b: f64, mass: f64) -> Result<f64> {
    let (u0, b, mass) = (positive("u0", u0)?, positive("b", b)?, positive("mass", mass)?);
    Ok((2.0 * u0 / (mass * b * b)).sqrt())
}

fn image_count(spec: &DisorderSpec, d: usize, extent: f64) -> i64 {
    match *spec {
        DisorderSpec::GaussianCorrelated { b, .. } => (10.0 * b / extent).ceil() as i64 + 1,
        DisorderSpec::OrnsteinZernike { b, .. } => (40.0 * b / extent).ceil() as i64 + 1,
        DisorderSpec::LorentzCorrelated { .. } if d == 1 => 256,
        _ => 2,
    }
}

/// Squared lattice wavenumber of the second-order stencil, `Σ (2/h)² sin²(q h/2)`.
fn stencil_q2(grid: &Grid, coords: &[usize]) -> f64 {
    coords
        .iter()
        .enumerate()
        .map(|(a, &k)| {
            let h = grid.spacing[a];
            let q = 2.0 * PI * signed_frequency(k, grid.shape[a]) / grid.extent(a);
            (2.0 / h * (0.5 * q * h).sin()).powi(2)
        })
        .sum()
}

/// Lattice spectrum `S_k`: the DFT of the covariance the synthesizer realizes, so that
/// `C(x) = N⁻¹ Σ_k S_k e^{iqx}`.
///
/// Smooth correlators are sampled on the lattice and periodized over images. The
/// delta correlator becomes a flat `κ²/h^d`. Ornstein–Zernike in `d ≥ 2` has a divergent
/// continuum variance and uses `κ²/(h^d(1 + b² q̂²))` with the stencil wavenumber `q̂`.
pub fn lattice_spectrum(spec: &DisorderSpec, grid: &Grid) -> Result<Vec<f64>> {
    spec.validate()?;
    let d = grid.dimension();
    let n = grid.len();
    let cell = grid.cell_volume();
    match *spec {
        DisorderSpec::Uncorrelated { kappa } => return Ok(vec![kappa * kappa / cell; n]),
        DisorderSpec::OrnsteinZernike { kappa, b } if d >= 2 => {
            let mut coords = vec![0; d];
            return Ok((0..n)
                .map(|i| {
                    grid.coords_into(i, &mut coords);
                    kappa * kappa / (cell * (1.0 + b * b * stencil_q2(grid, &coords)))
                })
                .collect());
        }
        _ => {}
    }
    // periodized real-space covariance, one image sum per axis offset
    let images: Vec<i64> = (0..d).map(|a| image_count(spec, d, grid.extent(a))).collect();
    let mut coords = vec![0; d];
    let mut buf: Vec<Complex64> = (0..n)
        .map(|i| {
            grid.coords_into(i, &mut coords);
            let base: Vec<f64> =
                (0..d).map(|a| grid.min_image(a, coords[a] as f64 * grid.spacing[a])).collect();
            let mut total = 0.0;
            let mut shift: Vec<i64> = images.iter().map(|m| -m).collect();
            loop {
                let r2: f64 = (0..d).map(|a| (base[a] + shift[a] as f64 * grid.extent(a)).powi(2)).sum();
                total += correlator(spec, d, r2.sqrt());
                let mut a = d;
                loop {
                    if a == 0 {
                        return Complex64::new(total, 0.0);
                    }
                    a -= 1;
                    if shift[a] < images[a] {
                        shift[a] += 1;
                        break;
                    }
                    shift[a] = -images[a];
                }
            }
        })
        .collect();
    NdFft::new(&grid.shape).forward(&mut buf);
    // S_k = S_{−k} and S_k ≥ 0 hold exactly; restore both after rounding, since √S
    // magnifies a tiny asymmetry in the far tail into an imaginary synthesis residue
    let mirror = |i: usize, coords: &mut [usize]| {
        grid.coords_into(i, coords);
        coords.iter().zip(&grid.shape).zip(grid.strides()).map(|((&c, &n), s)| (n - c) % n * s).sum::<usize>()
    };
    Ok((0..n).map(|i| (0.5 * (buf[i].re + buf[mirror(i, &mut coords)].re)).max(0.0)).collect())
}

/// Exact covariance `C(x) = ⟨U(0)U(x)⟩` of the synthesized ensemble.
pub fn lattice_covariance(spec: &DisorderSpec, grid: &Grid) -> Result<Field> {
    let spectrum = lattice_spectrum(spec, grid)?;
    let mut buf: Vec<Complex64> = spectrum.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    NdFft::new(&grid.shape).inverse(&mut buf);
    let n = grid.len() as f64;
    Field::new(grid.clone(), buf.iter().map(|c| c.re / n).collect())
}

/// Precomputed spectral filter for repeated synthesis on one grid.
pub struct FieldSynthesizer {
    spec: DisorderSpec,
    grid: Grid,
    amplitude: Vec<f64>,
    fft: Option<NdFft>,
    warnings: Vec<DomainWarning>,
}

impl FieldSynthesizer {
    pub fn new(spec: DisorderSpec, grid: &Grid) -> Result<Self> {
        spec.validate()?;
        if !grid.all_periodic() {
            return Err(Error::NonPeriodicGrid);
        }
        let mut warnings = Vec::new();
        if let Some(b) = spec.correlation_length() {
            let h = grid.spacing.iter().copied().fold(0.0, f64::max);
            if h > b / 2.0 {
                return Err(Error::GridTooCoarse { spacing: h, b });
            }
            let extent = (0..grid.dimension()).map(|a| grid.extent(a)).fold(f64::INFINITY, f64::min);
            if extent < MIN_EXTENT_IN_B * b {
                let w = DomainWarning::new(
                    WarningCode::ExtentTooSmall,
                    format!("grid extent {extent} is below {MIN_EXTENT_IN_B} correlation lengths"),
                );
                log::warn!("{}", w.message);
                warnings.push(w);
            }
        }
        let (amplitude, fft) = match spec {
            DisorderSpec::Uncorrelated { kappa } => (vec![kappa / grid.cell_volume().sqrt()], None),
            _ => {
                let s = lattice_spectrum(&spec, grid)?;
                (s.iter().map(|v| v.sqrt()).collect(), Some(NdFft::new(&grid.shape)))
            }
        };
        Ok(Self { spec, grid: grid.clone(), amplitude, fft, warnings })
    }

    pub fn spec(&self) -> &DisorderSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn warnings(&self) -> &[DomainWarning] {
        &self.warnings
    }

    pub fn synthesize(&self, seed: Seed) -> Result<Field> {
        let n = self.grid.len();
        let mut rng = seed.rng();
        let mut noise = (0..n).map(|_| -> f64 { StandardNormal.sample(&mut rng) });
        let Some(fft) = &self.fft else {
            let s = self.amplitude[0];
            return Ok(Field { grid: self.grid.clone(), values: noise.map(|w| s * w).collect() });
        };
        let mut buf: Vec<Complex64> = noise.by_ref().map(|w| Complex64::new(w, 0.0)).collect();
        fft.forward(&mut buf);
        for (c, &a) in buf.iter_mut().zip(&self.amplitude) {
            *c *= a;
        }
        fft.inverse(&mut buf);
        let scale = 1.0 / n as f64;
        let (mut re2, mut im2) = (0.0, 0.0);
        let values: Vec<f64> = buf
            .iter()
            .map(|c| {
                re2 += c.re * c.re;
                im2 += c.im * c.im;
                c.re * scale
            })
            .collect();
        let residue = if re2 > 0.0 { (im2 / re2).sqrt() } else { im2.sqrt() };
        if residue > IMAGINARY_TOLERANCE {
            return Err(Error::ImaginaryResidue(residue));
        }
        Ok(Field { grid: self.grid.clone(), values })
    }

    /// Realizations `range` of `stream`, synthesized in parallel and returned in index order.
    pub fn ensemble(&self, stream: u64, range: std::ops::Range<u64>) -> Result<Vec<Field>> {
        range.into_par_iter().map(|r| self.synthesize(Seed::new(stream, r))).collect()
    }
}

pub fn synthesize(spec: &DisorderSpec, grid: &Grid, seed: Seed) -> Result<Field> {
    FieldSynthesizer::new(*spec, grid)?.synthesize(seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorEstimate {
    /// Bin centres `r = k h_min`.
    pub lags: Vec<f64>,
    pub values: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub mean: f64,
    pub mean_error: f64,
    pub mean_square: f64,
    pub mean_square_error: f64,
    pub realizations: usize,
    /// Per-realization radial averages, ordered by realization index.
    pub per_realization: Vec<Vec<f64>>,
}

impl CorrelatorEstimate {
    /// Value and jackknife error of `K(r_i)/K(r_j)`.
    pub fn ratio(&self, i: usize, j: usize) -> (f64, f64) {
        let num: Vec<f64> = self.per_realization.iter().map(|row| row[i]).collect();
        let den: Vec<f64> = self.per_realization.iter().map(|row| row[j]).collect();
        stats::jackknife_ratio(&num, &den)
    }
}

/// Per-realization sufficient statistics; merging is concatenation keyed by realization
/// index, so the result does not depend on the order in which pieces arrive.
#[derive(Debug, Clone)]
pub struct CorrelatorAccumulator {
    grid: Grid,
    max_lag: usize,
    bins: Vec<Option<usize>>,
    bin_counts: Vec<usize>,
    rows: Vec<(u64, Vec<f64>, f64, f64)>,
}

impl CorrelatorAccumulator {
    pub fn new(grid: &Grid, max_lag: usize) -> Result<Self> {
        let h = grid.spacing.iter().copied().fold(f64::INFINITY, f64::min);
        let half = (0..grid.dimension()).map(|a| grid.extent(a) / 2.0).fold(f64::INFINITY, f64::min);
        if max_lag as f64 * h >= half {
            return Err(Error::InvalidInput(format!(
                "max_lag {max_lag} reaches half the grid extent {half}"
            )));
        }
        let d = grid.dimension();
        let mut coords = vec![0; d];
        let mut bin_counts = vec![0; max_lag + 1];
        let bins = (0..grid.len())
            .map(|i| {
                grid.coords_into(i, &mut coords);
                let r2: f64 =
                    (0..d).map(|a| grid.min_image(a, coords[a] as f64 * grid.spacing[a]).powi(2)).sum();
                let k = (r2.sqrt() / h).round() as usize;
                (k <= max_lag).then(|| {
                    bin_counts[k] += 1;
                    k
                })
            })
            .collect();
        Ok(Self { grid: grid.clone(), max_lag, bins, bin_counts, rows: Vec::new() })
    }

    pub fn add(&mut self, index: u64, field: &Field) -> Result<()> {
        if field.grid.shape != self.grid.shape {
            return Err(Error::ShapeMismatch);
        }
        let n = field.values.len();
        let mut buf: Vec<Complex64> = field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let fft = NdFft::new(&self.grid.shape);
        fft.forward(&mut buf);
        for c in buf.iter_mut() {
            *c = Complex64::new(c.norm_sqr(), 0.0);
        }
        fft.inverse(&mut buf);
        let norm = 1.0 / (n as f64 * n as f64);
        let mut sums = vec![0.0; self.max_lag + 1];
        for (c, bin) in buf.iter().zip(&self.bins) {
            if let Some(k) = bin {
                sums[*k] += c.re * norm;
            }
        }
        for (s, &count) in sums.iter_mut().zip(&self.bin_counts) {
            *s /= count as f64;
        }
        let mean = field.mean();
        let mean_sq = field.values.iter().map(|v| v * v).sum::<f64>() / n as f64;
        self.rows.push((index, sums, mean, mean_sq));
        Ok(())
    }

    pub fn merge(&mut self, other: CorrelatorAccumulator) -> Result<()> {
        if other.grid.shape != self.grid.shape || other.max_lag != self.max_lag {
            return Err(Error::ShapeMismatch);
        }
        self.rows.extend(other.rows);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn finish(mut self) -> Result<CorrelatorEstimate> {
        if self.rows.len() < 2 {
            return Err(Error::InsufficientEnsemble { required: 2, got: self.rows.len() });
        }
        self.rows.sort_by_key(|r| r.0);
        let h = self.grid.spacing.iter().copied().fold(f64::INFINITY, f64::min);
        let lags = (0..=self.max_lag).map(|k| k as f64 * h).collect();
        let mut values = Vec::with_capacity(self.max_lag + 1);
        let mut standard_errors = Vec::with_capacity(self.max_lag + 1);
        for k in 0..=self.max_lag {
            let column: Vec<f64> = self.rows.iter().map(|r| r.1[k]).collect();
            let (m, se) = stats::jackknife_mean(&column);
            values.push(m);
            standard_errors.push(se);
        }
        let (mean, mean_error) = stats::jackknife_mean(&self.rows.iter().map(|r| r.2).collect::<Vec<_>>());
        let (mean_square, mean_square_error) =
            stats::jackknife_mean(&self.rows.iter().map(|r| r.3).collect::<Vec<_>>());
        Ok(CorrelatorEstimate {
            lags,
            values,
            standard_errors,
            mean,
            mean_error,
            mean_square,
            mean_square_error,
            realizations: self.rows.len(),
            per_realization: self.rows.into_iter().map(|r| r.1).collect(),
        })
    }
}

/// Radially averaged `⟨U(x)U(x+r)⟩` for `r = 0, h, …, max_lag·h`, with jackknife errors
/// over realizations.
pub fn measure_correlator(fields: &[Field], max_lag: usize) -> Result<CorrelatorEstimate> {
    let Some(first) = fields.first() else {
        return Err(Error::InsufficientEnsemble { required: 2, got: 0 });
    };
    let template = CorrelatorAccumulator::new(&first.grid, max_lag)?;
    let parts: Vec<CorrelatorAccumulator> = fields
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let mut acc = template.clone();
            acc.add(i as u64, f).map(|_| acc)
        })
        .collect::<Result<_>>()?;
    let mut total = template;
    for p in parts {
        total.merge(p)?;
    }
    total.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Periodogram {
    /// Continuum wavenumber `|q|` of each DFT bin.
    pub wavenumbers: Vec<f64>,
    /// Ensemble mean of `h^d |Û_k|²/N`, an estimate of `h^d S_k`.
    pub mean: Vec<f64>,
    pub standard_errors: Vec<f64>,
}

pub fn periodogram(fields: &[Field]) -> Result<Periodogram> {
    if fields.len() < 2 {
        return Err(Error::InsufficientEnsemble { required: 2, got: fields.len() });
    }
    let grid = &fields[0].grid;
    let fft = NdFft::new(&grid.shape);
    let n = grid.len();
    let scale = grid.cell_volume() / n as f64;
    let rows: Vec<Vec<f64>> = fields
        .par_iter()
        .map(|f| {
            let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft.forward(&mut buf);
            buf.iter().map(|c| c.norm_sqr() * scale).collect()
        })
        .collect();
    let mut coords = vec![0; grid.dimension()];
    let wavenumbers = (0..n)
        .map(|i| {
            grid.coords_into(i, &mut coords);
            coords
                .iter()
                .enumerate()
                .map(|(a, &k)| (2.0 * PI * signed_frequency(k, grid.shape[a]) / grid.extent(a)).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mut mean = vec![0.0; n];
    let mut standard_errors = vec![0.0; n];
    let mut column = vec![0.0; rows.len()];
    for k in 0..n {
        for (c, row) in column.iter_mut().zip(&rows) {
            *c = row[k];
        }
        (mean[k], standard_errors[k]) = stats::jackknife_mean(&column);
    }
    Ok(Periodogram { wavenumbers, mean, standard_errors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spectrum_examples() {
        let u = DisorderSpec::Uncorrelated { kappa: 1.7 };
        assert_relative_eq!(correlator_spectrum(&u, 3, 12.0), 1.7 * 1.7, max_relative = 1e-15);
        let g = DisorderSpec::GaussianCorrelated { u0: 1.0, b: 1.0 };
        assert_relative_eq!(correlator_spectrum(&g, 3, 0.0), 15.749609945722419, max_relative = 1e-14);
        let oz = DisorderSpec::OrnsteinZernike { kappa: 2.0, b: 3.0 };
        assert_relative_eq!(correlator_spectrum(&oz, 2, 1.0 / 3.0), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn k0_reference_values() {
        assert_relative_eq!(bessel_k0(1.0), 0.42102443824070834, max_relative = 1e-12);
        assert_relative_eq!(bessel_k0(0.1), 2.4270690247020166, max_relative = 1e-12);
        assert_relative_eq!(bessel_k0(5.0), 0.0036910983340425942, max_relative = 1e-12);
    }

    #[test]
    fn frequency_examples() {
        assert_relative_eq!(effective_disorder_frequency(1.0, 1.0, 1.0).unwrap(), 2f64.sqrt());
        assert_relative_eq!(effective_disorder_frequency(1.0, 2.0, 1.0).unwrap(), 2f64.sqrt() / 2.0);
    }

    #[test]
    fn lattice_covariance_matches_sampled_kernel() {
        let grid = Grid::cubic(1, 256, 0.25).unwrap();
        let spec = DisorderSpec::GaussianCorrelated { u0: 1.3, b: 2.0 };
        let c = lattice_covariance(&spec, &grid).unwrap();
        for k in [0usize, 4, 8, 16] {
            let r = k as f64 * 0.25;
            assert!((c.values[k] - correlator(&spec, 1, r)).abs() < 1e-12);
        }
        let oz = DisorderSpec::OrnsteinZernike { kappa: 1.0, b: 2.0 };
        let c = lattice_covariance(&oz, &grid).unwrap();
        assert!((c.values[8] - correlator(&oz, 1, 2.0)).abs() < 1e-10);
    }

    #[test]
    fn synthesis_is_deterministic_and_rejects_coarse_grids() {
        let grid = Grid::cubic(2, 32, 0.5).unwrap();
        let spec = DisorderSpec::LorentzCorrelated { u0: 1.0, b: 2.0 };
        let a = synthesize(&spec, &grid, Seed::new(7, 3)).unwrap();
        let b = synthesize(&spec, &grid, Seed::new(7, 3)).unwrap();
        assert_eq!(a.values, b.values);
        let c = synthesize(&spec, &grid, Seed::new(7, 4)).unwrap();
        assert_ne!(a.values, c.values);
        let coarse = DisorderSpec::GaussianCorrelated { u0: 1.0, b: 0.9 };
        assert!(matches!(synthesize(&coarse, &grid, Seed::new(0, 0)), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn zero_fields_give_zero_correlator() {
        let grid = Grid::cubic(1, 16, 1.0).unwrap();
        let fields = vec![Field::zeros(&grid), Field::zeros(&grid)];
        let est = measure_correlator(&fields, 4).unwrap();
        assert!(est.values.iter().all(|&v| v == 0.0));
        assert!(matches!(measure_correlator(&fields[..1], 4), Err(Error::InsufficientEnsemble { .. })));
        assert!(measure_correlator(&fields, 8).is_err());
    }

    #[test]
    fn uncorrelated_site_variance() {
        let grid = Grid::cubic(1, 1 << 14, 0.5).unwrap();
        let synth = FieldSynthesizer::new(DisorderSpec::Uncorrelated { kappa: 1.0 }, &grid).unwrap();
        let fields = synth.ensemble(11, 0..64).unwrap();
        let est = measure_correlator(&fields, 2).unwrap();
        assert!((est.values[0] - 2.0).abs() < 3.0 * est.standard_errors[0]);
        assert!(est.values[1].abs() < 3.0 * est.standard_errors[1]);
    }
}
