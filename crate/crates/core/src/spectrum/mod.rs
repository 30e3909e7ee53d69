//! Single-particle Schrödinger problem on a lattice potential: operator action, lowest
//! eigenpairs, density-of-states tails and localization geometry.

mod lanczos;
pub mod localization;
pub mod tail;
mod tridiag;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::grid::{Field, Grid};
use lanczos::{largest_eigenpairs, LanczosConfig, Operator};
use tridiag::Chain;

pub use localization::{localization_metrics, LocalizationMetrics};
pub use tail::{dos_tail_fit, fit_tail, DosTailFit, HamiltonianTemplate, LevelRecord, TailConfig, TailWindow};

/// Largest problem handed to the dense oracle.
pub const DENSE_LIMIT: usize = 4096;

/// `−(ħ²/2m)∇² + U` with the second-order central Laplacian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub potential: Field,
    pub mass: f64,
    pub hbar: f64,
}

impl HamiltonianSpec {
    pub fn new(potential: Field, mass: f64, hbar: f64) -> Result<Self> {
        positive("mass", mass)?;
        positive("hbar", hbar)?;
        Ok(Self { potential, mass, hbar })
    }

    pub fn free(grid: &Grid, mass: f64, hbar: f64) -> Result<Self> {
        Self::new(Field::zeros(grid), mass, hbar)
    }

    pub fn grid(&self) -> &Grid {
        &self.potential.grid
    }

    /// Hopping `ħ²/(2m h_a²)` along each axis.
    pub fn hopping(&self) -> Vec<f64> {
        self.grid().spacing.iter().map(|h| self.hbar * self.hbar / (2.0 * self.mass * h * h)).collect()
    }

    /// Gershgorin bounds on the spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let kin: f64 = self.hopping().iter().map(|c| 4.0 * c).sum();
        (self.potential.min(), self.potential.max() + kin)
    }

    pub(crate) fn apply_slice(&self, x: &[f64], y: &mut [f64]) {
        let grid = self.grid();
        for ((y, x), u) in y.iter_mut().zip(x).zip(&self.potential.values) {
            *y = u * x;
        }
        let strides = grid.strides();
        for (axis, c) in self.hopping().into_iter().enumerate() {
            let n = grid.shape[axis];
            let s = strides[axis];
            let periodic = grid.periodic[axis];
            let block = n * s;
            for base in (0..x.len()).step_by(block) {
                for k in 0..n {
                    let row = base + k * s;
                    let prev = if k > 0 {
                        Some(row - s)
                    } else if periodic {
                        Some(base + (n - 1) * s)
                    } else {
                        None
                    };
                    let next = if k + 1 < n {
                        Some(row + s)
                    } else if periodic {
                        Some(base)
                    } else {
                        None
                    };
                    for lo in 0..s {
                        let i = row + lo;
                        let left = prev.map_or(0.0, |p| x[p + lo]);
                        let right = next.map_or(0.0, |q| x[q + lo]);
                        y[i] += c * (2.0 * x[i] - left - right);
                    }
                }
            }
        }
    }
}

pub fn apply_hamiltonian(spec: &HamiltonianSpec, state: &Field) -> Result<Field> {
    if !state.same_shape(&spec.potential) {
        return Err(Error::ShapeMismatch);
    }
    let mut out = vec![0.0; state.values.len()];
    spec.apply_slice(&state.values, &mut out);
    Ok(Field { grid: state.grid.clone(), values: out })
}

/// `⟨ψ,Hψ⟩/⟨ψ,ψ⟩`.
pub fn rayleigh_quotient(spec: &HamiltonianSpec, state: &Field) -> Result<f64> {
    let h = apply_hamiltonian(spec, state)?;
    Ok(state.inner(&h) / state.norm_sq())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSet {
    pub energies: Vec<f64>,
    /// Modes with `Σ|ψ|² h^d = 1`.
    pub modes: Vec<Field>,
    /// `‖Hψ − Eψ‖/‖ψ‖` per pair.
    pub residuals: Vec<f64>,
}

impl EigenSet {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.modes.iter().enumerate() {
            for (j, b) in self.modes.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - target).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Absolute residual bound in energy units.
    pub tol: f64,
    pub max_restarts: usize,
    /// Shift-invert with an inertia certificate on one-dimensional grids.
    pub shift_invert: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-8, max_restarts: 2000, shift_invert: true }
    }
}

struct NegatedHamiltonian<'a>(&'a HamiltonianSpec);

impl Operator for NegatedHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.0.potential.values.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply_slice(x, y);
        y.iter_mut().for_each(|v| *v = -*v);
    }
}

fn residual_and_energy(spec: &HamiltonianSpec, v: &[f64], scratch: &mut [f64]) -> (f64, f64) {
    spec.apply_slice(v, scratch);
    let nv: f64 = v.iter().map(|x| x * x).sum();
    let e = v.iter().zip(scratch.iter()).map(|(a, b)| a * b).sum::<f64>() / nv;
    let r = v.iter().zip(scratch.iter()).map(|(a, b)| (b - e * a).powi(2)).sum::<f64>().sqrt() / nv.sqrt();
    (e, r)
}

/// Rayleigh–Ritz of `H` on the span of `vectors`, returning ascending pairs.
fn finalize(spec: &HamiltonianSpec, mut vectors: Vec<Vec<f64>>) -> EigenSet {
    for v in vectors.iter_mut() {
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= nv);
    }
    let k = vectors.len();
    let n = spec.potential.values.len();
    let hv: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| {
            let mut y = vec![0.0; n];
            spec.apply_slice(v, &mut y);
            y
        })
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut g = DMatrix::<f64>::zeros(k, k);
    let mut s = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let val = 0.5 * (dot(&vectors[i], &hv[j]) + dot(&vectors[j], &hv[i]));
            g[(i, j)] = val;
            g[(j, i)] = val;
            let o = dot(&vectors[i], &vectors[j]);
            s[(i, j)] = o;
            s[(j, i)] = o;
        }
    }
    // vectors are orthonormal to rounding; fold the tiny overlap correction in to first order
    let correction = (&s - DMatrix::identity(k, k)) * 0.5;
    let g = &g - &correction * &g - &g * &correction;
    let eig = SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let cell = spec.grid().cell_volume().sqrt();
    let mut scratch = vec![0.0; n];
    let mut out = EigenSet { energies: Vec::new(), modes: Vec::new(), residuals: Vec::new() };
    for j in order {
        let col = eig.eigenvectors.column(j);
        let mut v = vec![0.0; n];
        for (basis, c) in vectors.iter().zip(col.iter()) {
            v.iter_mut().zip(basis).for_each(|(x, b)| *x += c * b);
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        // deterministic sign: largest-magnitude entry positive
        let pivot = v.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        v.iter_mut().for_each(|x| *x *= sign / nv);
        let (e, r) = residual_and_energy(spec, &v, &mut scratch);
        out.energies.push(e);
        out.residuals.push(r);
        out.modes.push(Field { grid: spec.grid().clone(), values: v.iter().map(|x| x / cell).collect() });
    }
    out
}

/// Number of eigenvalues strictly below `energy`, from the inertia of `H − E`.
/// Available for one-dimensional grids only.
pub fn count_below(spec: &HamiltonianSpec, energy: f64) -> Option<usize> {
    chain_of(spec).map(|c| c.count_below(energy))
}

fn chain_of(spec: &HamiltonianSpec) -> Option<Chain> {
    let grid = spec.grid();
    (grid.dimension() == 1).then(|| Chain::new(&spec.potential.values, spec.hopping()[0], grid.periodic[0]))
}

pub fn lowest_eigenpairs(spec: &HamiltonianSpec, k: usize, tol: f64) -> Result<EigenSet> {
    lowest_eigenpairs_with(spec, k, &SolverConfig { tol, ..SolverConfig::default() })
}

pub fn lowest_eigenpairs_with(spec: &HamiltonianSpec, k: usize, config: &SolverConfig) -> Result<EigenSet> {
    let n = spec.potential.values.len();
    positive("tol", config.tol)?;
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("requested {k} eigenpairs of a {n}-point problem")));
    }
    if !spec.potential.values.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("potential is not finite".into()));
    }
    match chain_of(spec) {
        Some(chain) if config.shift_invert && n > 2 => shift_invert_1d(spec, &chain, k, config),
        _ => plain(spec, k, config),
    }
}

fn no_convergence(spec: &HamiltonianSpec, pairs: Vec<Vec<f64>>, iterations: usize) -> Error {
    let best = finalize(spec, pairs);
    let max_residual = best.residuals.iter().copied().fold(0.0, f64::max);
    Error::NoConvergence { iterations, max_residual, best: Box::new(best) }
}

fn plain(spec: &HamiltonianSpec, k: usize, config: &SolverConfig) -> Result<EigenSet> {
    let n = spec.potential.values.len();
    let op = NegatedHamiltonian(spec);
    let cfg = LanczosConfig::for_count(k, n, config.max_restarts);
    let tol = config.tol;
    let outcome = largest_eigenpairs(&op, cfg, &mut |_, _, res| res <= 0.5 * tol);
    let vectors: Vec<Vec<f64>> = outcome.pairs.into_iter().map(|p| p.vector).collect();
    if !outcome.converged {
        return Err(no_convergence(spec, vectors, outcome.restarts));
    }
    let set = finalize(spec, vectors);
    certify(spec, set, config, outcome.restarts)
}

fn certify(spec: &HamiltonianSpec, set: EigenSet, config: &SolverConfig, restarts: usize) -> Result<EigenSet> {
    let max_residual = set.residuals.iter().copied().fold(0.0, f64::max);
    if max_residual > config.tol {
        let vectors = set.modes.iter().map(|m| m.values.clone()).collect();
        return Err(no_convergence(spec, vectors, restarts));
    }
    Ok(set)
}

fn shift_invert_1d(spec: &HamiltonianSpec, chain: &Chain, k: usize, config: &SolverConfig) -> Result<EigenSet> {
    let n = chain.len();
    let (lo, hi) = chain.bounds();
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let lambda1 = chain.eigenvalue(1, 1e-14);
    let upper = chain.eigenvalue((k + 1).min(n), 1e-14);
    let mut margin = (0.05 * (upper - lambda1)).max(1e-9 * scale);
    let factor = loop {
        if let Some(f) = chain.factor(lambda1 - margin) {
            break f;
        }
        margin *= 2.0;
    };
    let sigma = lambda1 - margin;
    let mut scratch = vec![0.0; n];
    let tol = config.tol;
    let mut wanted = k;
    for attempt in 0..3u64 {
        let mut cfg = LanczosConfig::for_count(wanted, n, config.max_restarts);
        cfg.seed = cfg.seed.wrapping_add(attempt);
        let outcome = largest_eigenpairs(&factor, cfg, &mut |v, theta, res| {
            // cheap screen in the inverted operator before the explicit residual of H
            if res > 1e-3 * theta {
                return false;
            }
            residual_and_energy(spec, v, &mut scratch).1 <= 0.5 * tol
        });
        let vectors: Vec<Vec<f64>> = outcome.pairs.into_iter().map(|p| p.vector).collect();
        if !outcome.converged {
            return Err(no_convergence(spec, vectors, outcome.restarts));
        }
        let mut set = finalize(spec, vectors);
        set.energies.truncate(k);
        set.modes.truncate(k);
        set.residuals.truncate(k);
        // inertia certificate: nothing below the k-th level was skipped
        let eps = tol.max(1e-12 * scale);
        let below = chain.count_below(set.energies[k - 1] - eps);
        if below < k {
            log::debug!("shift {sigma:.6e}: {k} levels certified after {} restarts", outcome.restarts);
            return certify(spec, set, config, outcome.restarts);
        }
        let missing = below + 1 - k;
        log::debug!("inertia count reports {missing} skipped levels; retrying");
        if attempt == 2 {
            let vectors = set.modes.iter().map(|m| m.values.clone()).collect();
            return Err(no_convergence(spec, vectors, outcome.restarts));
        }
        wanted = (wanted + missing).min(n);
    }
    unreachable!("the final attempt always returns")
}

/// Dense symmetric matrix of `H`, for oracle comparisons.
pub fn dense_hamiltonian(spec: &HamiltonianSpec) -> Result<DMatrix<f64>> {
    let n = spec.potential.values.len();
    if n > DENSE_LIMIT {
        return Err(Error::InvalidInput(format!("{n} points exceed the dense limit {DENSE_LIMIT}")));
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        spec.apply_slice(&e, &mut col);
        e[j] = 0.0;
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    Ok(m)
}

/// All eigenvalues, ascending, by dense diagonalization.
pub fn dense_eigenvalues(spec: &HamiltonianSpec) -> Result<Vec<f64>> {
    let m = dense_hamiltonian(spec)?;
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn plane_wave_dispersion() {
        let grid = Grid::cubic(1, 32, 0.5).unwrap();
        let spec = HamiltonianSpec::free(&grid, 1.0, 1.0).unwrap();
        let k = 2.0 * std::f64::consts::PI * 3.0 / grid.extent(0);
        let psi = Field::from_fn(&grid, |x| (k * x[0]).cos());
        let h = apply_hamiltonian(&spec, &psi).unwrap();
        let e = (1.0 - (k * 0.5).cos()) / 0.25;
        for (a, b) in h.values.iter().zip(&psi.values) {
            assert!((a - e * b).abs() < 1e-12);
        }
    }

    #[test]
    fn free_chain_ground_state() {
        let grid = Grid::cubic(1, 64, 1.0).unwrap();
        let spec = HamiltonianSpec::free(&grid, 1.0, 1.0).unwrap();
        let set = lowest_eigenpairs(&spec, 3, 1e-9).unwrap();
        assert!(set.energies[0].abs() < 1e-9);
        let first = 1.0 - (2.0 * std::f64::consts::PI / 64.0).cos();
        assert_relative_eq!(set.energies[1], first, max_relative = 1e-8);
        assert_relative_eq!(set.energies[2], first, max_relative = 1e-8);
        let mean = set.modes[0].mean();
        assert!(set.modes[0].values.iter().all(|v| (v - mean).abs() < 1e-6));
    }

    #[test]
    fn plain_and_shift_invert_agree_with_dense() {
        let grid = Grid::cubic(1, 96, 0.5).unwrap();
        let u = Field::from_fn(&grid, |x| (1.7 * x[0]).sin() * 3.0 + (0.31 * x[0] * x[0]).cos());
        let spec = HamiltonianSpec::new(u, 1.0, 1.0).unwrap();
        let dense = dense_eigenvalues(&spec).unwrap();
        for shift_invert in [true, false] {
            let cfg = SolverConfig { tol: 1e-9, shift_invert, ..SolverConfig::default() };
            let set = lowest_eigenpairs_with(&spec, 5, &cfg).unwrap();
            for (a, b) in set.energies.iter().zip(&dense) {
                assert_relative_eq!(*a, *b, max_relative = 1e-8, epsilon = 1e-10);
            }
            assert!(set.orthogonality_defect() < 1e-8);
        }
    }
}
