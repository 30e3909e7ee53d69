//! Gross–Pitaevskii ground states by normalized imaginary-time gradient flow.
//!
//! The functional is
//! `E[ψ] = Σ h^d [ (ħ²/2m)|∇ψ|² + (V_trap + U)ψ² + (g/2)ψ⁴ ]` with the same second-order
//! stencil as the single-particle solver and `Σ ψ² h^d = N`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::fft::{signed_frequency, NdFft};
use crate::grid::{Field, Grid};
use crate::spectrum::HamiltonianSpec;

/// Isotropic harmonic trap `½ m ω² |x − c|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTrap {
    pub omega: f64,
    /// Trap centre; the middle of the box when absent.
    pub center: Option<Vec<f64>>,
}

impl HarmonicTrap {
    pub fn centered(omega: f64) -> Self {
        Self { omega, center: None }
    }

    pub fn center_on(&self, grid: &Grid) -> Vec<f64> {
        self.center.clone().unwrap_or_else(|| (0..grid.dimension()).map(|a| grid.extent(a) / 2.0).collect())
    }

    pub fn potential(&self, grid: &Grid, mass: f64) -> Field {
        let c = self.center_on(grid);
        let k = 0.5 * mass * self.omega * self.omega;
        Field::from_fn(grid, |x| k * x.iter().zip(&c).map(|(x, c)| (x - c).powi(2)).sum::<f64>())
    }

    pub fn oscillator_length(&self, hbar: f64, mass: f64) -> f64 {
        (hbar / (mass * self.omega)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpeProblem {
    /// Random potential `U`; zeros for a clean trap.
    pub disorder: Field,
    pub trap: Option<HarmonicTrap>,
    pub coupling: f64,
    pub particle_count: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl GpeProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.coupling >= 0.0) {
            return Err(Error::NonPositiveInput { name: "coupling_g", value: self.coupling });
        }
        positive("particle_count", self.particle_count)?;
        positive("mass", self.mass)?;
        positive("hbar", self.hbar)?;
        if let Some(t) = &self.trap {
            positive("trap_frequency", t.omega)?;
            if t.center.as_ref().is_some_and(|c| c.len() != self.grid().dimension()) {
                return Err(Error::ShapeMismatch);
            }
        }
        if !self.disorder.values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("potential is not finite".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        &self.disorder.grid
    }

    pub fn trap_potential(&self) -> Field {
        match &self.trap {
            Some(t) => t.potential(self.grid(), self.mass),
            None => Field::zeros(self.grid()),
        }
    }

    /// Trap plus disorder.
    pub fn external_potential(&self) -> Field {
        let mut v = self.trap_potential();
        v.values.iter_mut().zip(&self.disorder.values).for_each(|(v, u)| *v += u);
        v
    }

    fn kinetic(&self) -> HamiltonianSpec {
        HamiltonianSpec { potential: Field::zeros(self.grid()), mass: self.mass, hbar: self.hbar }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub trap: f64,
    pub disorder: f64,
    pub interaction: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.kinetic + self.trap + self.disorder + self.interaction
    }

    /// `μ = (E_kin + E_trap + E_dis + 2E_int)/N`.
    pub fn chemical_potential(&self, n: f64) -> f64 {
        (self.kinetic + self.trap + self.disorder + 2.0 * self.interaction) / n
    }

    /// Positive energy scale per particle used to make residuals relative.
    fn scale(&self, n: f64) -> f64 {
        (self.kinetic.abs() + self.trap.abs() + self.disorder.abs() + 2.0 * self.interaction.abs()) / n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Relative energy change per step that counts as stationary.
    pub energy_tol: f64,
    /// Bound on `‖(H_GP − μ)ψ‖/(‖ψ‖ ε)` with `ε` the energy scale per particle.
    pub residual_tol: f64,
    /// Consecutive stationary steps required.
    pub window: usize,
    pub max_iterations: usize,
    /// Fraction of the explicit stability bound used as the time step.
    pub step_safety: f64,
    pub max_backtracks: usize,
    /// Independent starts; the lowest energy wins.
    pub starts: usize,
    pub seed: u64,
    /// Keep the total energy after every accepted step.
    pub record_history: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            energy_tol: 1e-12,
            residual_tol: 1e-5,
            window: 10,
            max_iterations: 500_000,
            step_safety: 0.9,
            max_backtracks: 30,
            starts: 5,
            seed: 0,
            record_history: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    /// Real nonnegative amplitude with `Σ ψ² h^d = N`.
    pub psi: Field,
    pub chemical_potential: f64,
    pub energy: EnergyBreakdown,
    pub iterations: usize,
    /// Relative residual `‖(H_GP − μ)ψ‖/(‖ψ‖ ε)`.
    pub residual: f64,
    /// Accepted steps; the energy never rose on any of them.
    pub accepted_steps: usize,
    /// Spread `max E − min E` over converged starts.
    pub start_energy_spread: f64,
    pub starts: usize,
    /// Total energy of the normalized initial guess and after each accepted step, when
    /// requested.
    pub energy_history: Vec<f64>,
}

impl GroundState {
    pub fn density(&self) -> Field {
        Field { grid: self.psi.grid.clone(), values: self.psi.values.iter().map(|v| v * v).collect() }
    }
}

struct Workspace<'a> {
    problem: &'a GpeProblem,
    kinetic: HamiltonianSpec,
    trap: Field,
    cell: f64,
    kin_radius: f64,
}

impl<'a> Workspace<'a> {
    fn new(problem: &'a GpeProblem) -> Self {
        let kinetic = problem.kinetic();
        let kin_radius = kinetic.hopping().iter().map(|c| 4.0 * c).sum();
        Self { trap: problem.trap_potential(), cell: problem.grid().cell_volume(), kinetic, kin_radius, problem }
    }

    fn energies(&self, psi: &[f64], kin: &mut [f64]) -> EnergyBreakdown {
        self.kinetic.apply_slice(psi, kin);
        let mut e = EnergyBreakdown::default();
        let g = self.problem.coupling;
        for i in 0..psi.len() {
            let p2 = psi[i] * psi[i];
            e.kinetic += psi[i] * kin[i];
            e.trap += self.trap.values[i] * p2;
            e.disorder += self.problem.disorder.values[i] * p2;
            e.interaction += 0.5 * g * p2 * p2;
        }
        e.kinetic *= self.cell;
        e.trap *= self.cell;
        e.disorder *= self.cell;
        e.interaction *= self.cell;
        e
    }

    /// Writes `H_GP ψ` into `out`, with `kin` holding `Kψ` on entry.
    fn gp_action(&self, psi: &[f64], kin: &[f64], out: &mut [f64]) {
        let g = self.problem.coupling;
        for i in 0..psi.len() {
            let v = self.trap.values[i] + self.problem.disorder.values[i] + g * psi[i] * psi[i];
            out[i] = kin[i] + v * psi[i];
        }
    }

    fn normalize(&self, psi: &mut [f64]) {
        let norm: f64 = psi.iter().map(|v| v * v).sum::<f64>() * self.cell;
        let s = (self.problem.particle_count / norm).sqrt();
        psi.iter_mut().for_each(|v| *v = v.abs() * s);
    }

    /// `1/(ρ(K) + max V_eff − min V_eff)`.
    fn stable_step(&self, psi: &[f64]) -> f64 {
        let g = self.problem.coupling;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..psi.len() {
            let v = self.trap.values[i] + self.problem.disorder.values[i] + g * psi[i] * psi[i];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        1.0 / (self.kin_radius + hi - lo)
    }
}

/// Generalized Thomas–Fermi density `max(0, (μ − V)/g)` normalized to `N` by bisection.
fn thomas_fermi_density(v: &Field, g: f64, n: f64) -> (Vec<f64>, f64) {
    let cell = v.grid.cell_volume();
    let count = |mu: f64| v.values.iter().map(|&x| (mu - x).max(0.0)).sum::<f64>() * cell / g;
    let mut lo = v.min();
    let mut hi = lo + 1.0;
    while count(hi) < n {
        hi = lo + 2.0 * (hi - lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count(mid) < n {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1e-300) {
            break;
        }
    }
    let mu = 0.5 * (lo + hi);
    let mut dens: Vec<f64> = v.values.iter().map(|&x| (mu - x).max(0.0) / g).collect();
    let total: f64 = dens.iter().sum::<f64>() * cell;
    dens.iter_mut().for_each(|d| *d *= n / total);
    (dens, mu)
}

fn initial_guess(problem: &GpeProblem) -> Vec<f64> {
    let v = problem.external_potential();
    if problem.coupling > 0.0 {
        let (dens, _) = thomas_fermi_density(&v, problem.coupling, problem.particle_count);
        let peak = dens.iter().copied().fold(0.0, f64::max);
        return dens.iter().map(|d| d.max(1e-3 * peak).sqrt()).collect();
    }
    let grid = problem.grid();
    let center = grid.position(v.argmin());
    let width = match &problem.trap {
        Some(t) => t.oscillator_length(problem.hbar, problem.mass),
        None => (0..grid.dimension()).map(|a| grid.extent(a)).fold(f64::INFINITY, f64::min) / 8.0,
    };
    let mut coords = vec![0; grid.dimension()];
    (0..grid.len())
        .map(|i| {
            grid.coords_into(i, &mut coords);
            let r2: f64 = (0..grid.dimension())
                .map(|a| grid.min_image(a, coords[a] as f64 * grid.spacing[a] - center[a]).powi(2))
                .sum();
            (-r2 / (4.0 * width * width)).exp().max(1e-150)
        })
        .collect()
}

fn flow(problem: &GpeProblem, mut psi: Vec<f64>, config: &FlowConfig) -> Result<GroundState> {
    let ws = Workspace::new(problem);
    let n = psi.len();
    let count = problem.particle_count;
    ws.normalize(&mut psi);
    let mut kin = vec![0.0; n];
    let mut action = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial_kin = vec![0.0; n];
    let mut energy = ws.energies(&psi, &mut kin);
    let mut history = Vec::new();
    if config.record_history {
        history.push(energy.total());
    }
    let mut accepted = 0;
    let mut quiet = 0;
    let mut dt = config.step_safety * ws.stable_step(&psi);
    let mut last_mu = energy.chemical_potential(count);
    let mut residual = f64::INFINITY;
    let mut energy_change = f64::INFINITY;
    for iteration in 0..config.max_iterations {
        let mu = energy.chemical_potential(count);
        ws.gp_action(&psi, &kin, &mut action);
        let mut r2 = 0.0;
        for i in 0..n {
            action[i] -= mu * psi[i];
            r2 += action[i] * action[i];
        }
        let psi_norm = (count / ws.cell).sqrt();
        residual = r2.sqrt() / psi_norm / energy.scale(count).max(f64::MIN_POSITIVE);
        if quiet >= config.window && residual <= config.residual_tol {
            return Ok(finish(problem, psi, energy, iteration, residual, accepted, history));
        }
        if (mu - last_mu).abs() > 0.1 * last_mu.abs() || iteration % 64 == 0 {
            dt = config.step_safety * ws.stable_step(&psi);
            last_mu = mu;
        }
        let mut step = dt;
        let mut backtracks = 0;
        loop {
            for i in 0..n {
                trial[i] = psi[i] - step * action[i];
            }
            ws.normalize(&mut trial);
            let e = ws.energies(&trial, &mut trial_kin);
            if e.total() <= energy.total() {
                energy_change = (energy.total() - e.total()) / energy.total().abs().max(f64::MIN_POSITIVE);
                std::mem::swap(&mut psi, &mut trial);
                std::mem::swap(&mut kin, &mut trial_kin);
                energy = e;
                accepted += 1;
                if config.record_history {
                    history.push(e.total());
                }
                break;
            }
            backtracks += 1;
            if backtracks > config.max_backtracks {
                // no descent left at machine precision: stationary unless the residual says otherwise
                if residual <= config.residual_tol {
                    return Ok(finish(problem, psi, energy, iteration, residual, accepted, history));
                }
                return Err(Error::StepUnstable { iteration });
            }
            step *= 0.5;
        }
        quiet = if energy_change < config.energy_tol { quiet + 1 } else { 0 };
    }
    Err(Error::FlowNoConvergence { iterations: config.max_iterations, residual, energy_change })
}

fn finish(
    problem: &GpeProblem,
    psi: Vec<f64>,
    energy: EnergyBreakdown,
    iterations: usize,
    residual: f64,
    accepted: usize,
    energy_history: Vec<f64>,
) -> GroundState {
    GroundState {
        psi: Field { grid: problem.grid().clone(), values: psi },
        chemical_potential: energy.chemical_potential(problem.particle_count),
        energy,
        iterations,
        residual,
        accepted_steps: accepted,
        start_energy_spread: 0.0,
        starts: 1,
        energy_history,
    }
}

/// Ground state from `config.starts` starts: the deterministic initial guess and seeded
/// random multiplicative perturbations of it. The lowest energy is returned.
pub fn solve_ground_state(problem: &GpeProblem, config: &FlowConfig) -> Result<GroundState> {
    problem.validate()?;
    let base = initial_guess(problem);
    let starts = config.starts.max(1);
    let results: Vec<Result<GroundState>> = (0..starts as u64)
        .into_par_iter()
        .map(|s| {
            let guess = if s == 0 {
                base.clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(s);
                base.iter().map(|v| v * (1.0 + 0.5 * rng.random::<f64>())).collect()
            };
            flow(problem, guess, config)
        })
        .collect();
    let mut best: Option<GroundState> = None;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut converged = 0;
    let mut first_error = None;
    for r in results {
        match r {
            Ok(state) => {
                converged += 1;
                let e = state.energy.total();
                lo = lo.min(e);
                hi = hi.max(e);
                if best.as_ref().is_none_or(|b| e < b.energy.total()) {
                    best = Some(state);
                }
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    match best {
        Some(mut state) => {
            state.start_energy_spread = hi - lo;
            state.starts = converged;
            Ok(state)
        }
        None => Err(first_error.expect("at least one start ran")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThomasFermiProfile {
    pub density: Field,
    /// Chemical potential fixed by `∫ n_TF = N`.
    pub chemical_potential: f64,
    /// `√(2μ/(mω²))` from the normalized profile.
    pub radius_from_mu: f64,
    /// Closed-form radius from the analytic regime formulas.
    pub radius: f64,
}

/// Thomas–Fermi density `max(0, (μ − V)/g)` in the external potential.
pub fn thomas_fermi_profile(problem: &GpeProblem) -> Result<ThomasFermiProfile> {
    problem.validate()?;
    let Some(trap) = &problem.trap else {
        return Err(Error::NoTrap);
    };
    let g = positive("coupling_g", problem.coupling)?;
    let (dens, mu) = thomas_fermi_density(&problem.external_potential(), g, problem.particle_count);
    let d = problem.grid().dimension();
    let ell = trap.oscillator_length(problem.hbar, problem.mass);
    let radius =
        crate::analytic::trap::thomas_fermi_radius(d, g, problem.particle_count, problem.hbar, problem.mass, ell)?;
    Ok(ThomasFermiProfile {
        density: Field { grid: problem.grid().clone(), values: dens },
        chemical_potential: mu,
        radius_from_mu: (2.0 * mu / (problem.mass * trap.omega * trap.omega)).sqrt(),
        radius,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub chemical_potential: f64,
    pub energy: EnergyBreakdown,
    pub peak_density: f64,
    /// Standard deviation of the momentum distribution per axis.
    pub momentum_width: Vec<f64>,
    /// `√(Σ_a Δp_a²)`.
    pub momentum_width_total: f64,
    /// Relative mismatch of the real- and momentum-space norms.
    pub parseval_error: f64,
}

/// Quadratures of a state with the solver's stencil. Momentum moments use the stencil
/// wavenumber `q̂ = (2/h) sin(qh/2)`, so that `Σ_a Δp_a² = 2m E_kin/N` exactly.
pub fn observables(state: &Field, problem: &GpeProblem) -> Result<Observables> {
    if !state.same_shape(&problem.disorder) {
        return Err(Error::ShapeMismatch);
    }
    let ws = Workspace::new(problem);
    let n = state.values.len();
    let mut kin = vec![0.0; n];
    let energy = ws.energies(&state.values, &mut kin);
    let count = state.norm_sq();
    let grid = problem.grid();

    let mut buf: Vec<Complex64> = state.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    NdFft::new(&grid.shape).forward(&mut buf);
    let weights: Vec<f64> = buf.iter().map(|c| c.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    let parseval = total * ws.cell / n as f64;
    let parseval_error = if count > 0.0 { (parseval - count).abs() / count } else { parseval.abs() };

    let d = grid.dimension();
    let mut coords = vec![0; d];
    let mut first = vec![0.0; d];
    let mut second = vec![0.0; d];
    for (i, w) in weights.iter().enumerate() {
        grid.coords_into(i, &mut coords);
        for a in 0..d {
            let h = grid.spacing[a];
            let q = 2.0 * std::f64::consts::PI * signed_frequency(coords[a], grid.shape[a]) / grid.extent(a);
            let qh = 2.0 / h * (0.5 * q * h).sin();
            first[a] += w * qh;
            second[a] += w * qh * qh;
        }
    }
    let momentum_width: Vec<f64> = (0..d)
        .map(|a| {
            if total > 0.0 {
                let m = first[a] / total;
                problem.hbar * (second[a] / total - m * m).max(0.0).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let momentum_width_total = momentum_width.iter().map(|p| p * p).sum::<f64>().sqrt();
    Ok(Observables {
        chemical_potential: if count > 0.0 { energy.chemical_potential(count) } else { 0.0 },
        energy,
        peak_density: state.values.iter().map(|v| v * v).fold(0.0, f64::max),
        momentum_width,
        momentum_width_total,
        parseval_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn clean(d: usize, points: usize, h: f64, g: f64, n: f64) -> GpeProblem {
        let grid = Grid::cubic(d, points, h).unwrap();
        GpeProblem {
            disorder: Field::zeros(&grid),
            trap: Some(HarmonicTrap::centered(1.0)),
            coupling: g,
            particle_count: n,
            mass: 1.0,
            hbar: 1.0,
        }
    }

    #[test]
    fn oscillator_ground_state_one_dim() {
        let p = clean(1, 256, 16.0 / 256.0, 0.0, 1.0);
        let cfg = FlowConfig { starts: 1, ..FlowConfig::default() };
        let s = solve_ground_state(&p, &cfg).unwrap();
        assert_relative_eq!(s.energy.total(), 0.5, max_relative = 1e-3);
        let obs = observables(&s.psi, &p).unwrap();
        assert_relative_eq!(obs.momentum_width[0], 0.5f64.sqrt(), max_relative = 2e-3);
        assert!(obs.parseval_error < 1e-10);
    }

    #[test]
    fn chemical_potential_identity() {
        let p = clean(1, 128, 0.125, 5.0, 3.0);
        let s = solve_ground_state(&p, &FlowConfig { starts: 2, ..FlowConfig::default() }).unwrap();
        let e = s.energy;
        let mu = (e.kinetic + e.trap + e.disorder + 2.0 * e.interaction) / 3.0;
        assert_relative_eq!(s.chemical_potential, mu, max_relative = 1e-12);
        assert_relative_eq!(s.psi.norm_sq(), 3.0, max_relative = 1e-10);
        assert!(s.start_energy_spread < 1e-8);
    }

    #[test]
    fn thomas_fermi_profile_normalization() {
        let p = clean(3, 24, 0.5, 1.0, 500.0);
        let tf = thomas_fermi_profile(&p).unwrap();
        assert_relative_eq!(tf.density.integral(), 500.0, max_relative = 1e-10);
        assert_relative_eq!(tf.density.max(), tf.chemical_potential - 0.0, max_relative = 0.05);
        let no_trap = GpeProblem { trap: None, ..p };
        assert!(matches!(thomas_fermi_profile(&no_trap), Err(Error::NoTrap)));
    }

    #[test]
    fn gaussian_momentum_width_and_uniform_state() {
        let p = clean(1, 512, 0.0625, 0.0, 1.0);
        let sigma = 1.3;
        let mut psi = Field::from_fn(p.grid(), |x| (-(x[0] - 16.0).powi(2) / (4.0 * sigma * sigma)).exp());
        let k = psi.norm_sq();
        psi.scale(1.0 / k.sqrt());
        let obs = observables(&psi, &p).unwrap();
        assert_relative_eq!(obs.momentum_width[0], 1.0 / (2.0 * sigma), max_relative = 1e-3);
        let uniform = Field::constant(p.grid(), 1.0);
        assert_eq!(observables(&uniform, &p).unwrap().momentum_width[0], 0.0);
    }
}
