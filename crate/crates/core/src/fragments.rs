//! Density clusters of converged ground states: detection, geometry, tunneling estimates
//! and their scaling with density.
//!
//! A fragment is a maximal face-connected component of `{x : n(x) > n_thr}` on the
//! periodic grid. Components are traced with unwrapped coordinates, so a component that
//! reaches itself through a different image of the box winds around it and percolates.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::grid::{Field, Grid};
use crate::stats::{self, LinearFit};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ThresholdPolicy {
    /// Fraction of the peak density.
    Relative(f64),
    Absolute(f64),
    /// `ε|μ|/g`: a fixed fraction of the Thomas–Fermi density scale. With `g = 0` the
    /// policy falls back to `Relative(0.05)`.
    MuLevel { mu: f64, g: f64, epsilon: f64 },
}

impl ThresholdPolicy {
    pub const DEFAULT_RELATIVE: f64 = 0.05;

    pub fn mu_level(mu: f64, g: f64) -> Self {
        Self::MuLevel { mu, g, epsilon: Self::DEFAULT_RELATIVE }
    }

    pub fn level(&self, density: &Field) -> f64 {
        match *self {
            Self::Relative(eps) => eps * density.max(),
            Self::Absolute(level) => level,
            Self::MuLevel { mu, g, epsilon } if g > 0.0 => epsilon * mu.abs() / g,
            Self::MuLevel { .. } => Self::DEFAULT_RELATIVE * density.max(),
        }
    }
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        Self::Relative(Self::DEFAULT_RELATIVE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fragment {
    /// Position in the report; fragments are sorted by decreasing particle count.
    pub id: usize,
    pub centroid: Vec<f64>,
    pub rms_radius: f64,
    pub particle_count: f64,
    pub peak_density: f64,
    pub cells: usize,
    /// Winds around at least one periodic axis.
    pub percolating: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingStats {
    pub mean: f64,
    pub median: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairTunneling {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentReport {
    pub fragments: Vec<Fragment>,
    /// Nearest-neighbour centroid distances; absent with fewer than two fragments.
    pub spacing: Option<SpacingStats>,
    /// Nearest-neighbour pairs, filled by [`FragmentReport::with_tunneling`].
    pub tunneling: Vec<PairTunneling>,
    pub threshold: f64,
    pub total_mass: f64,
    pub below_threshold_mass: f64,
    pub captured_fraction: f64,
}

impl FragmentReport {
    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    pub fn captured_mass(&self) -> f64 {
        self.fragments.iter().map(|f| f.particle_count).sum()
    }

    /// A single fragment that winds around the box.
    pub fn single_percolating(&self) -> bool {
        self.fragments.len() == 1 && self.fragments[0].percolating
    }

    pub fn median_rms_radius(&self) -> Option<f64> {
        (!self.is_empty()).then(|| stats::median(&self.fragments.iter().map(|f| f.rms_radius).collect::<Vec<_>>()))
    }

    /// Estimates tunneling between each fragment and its nearest neighbour.
    pub fn with_tunneling(mut self, grid: &Grid, potential: &Field, mu: f64, mass: f64, hbar: f64) -> Self {
        let mut pairs = Vec::new();
        for (i, j) in nearest_pairs(grid, &self.fragments) {
            let (a, b) = (&self.fragments[i], &self.fragments[j]);
            pairs.push(PairTunneling {
                a: i,
                b: j,
                distance: min_image_distance(grid, &a.centroid, &b.centroid),
                amplitude: wkb_tunneling(potential, mu, &a.centroid, &b.centroid, mass, hbar),
            });
        }
        self.tunneling = pairs;
        self
    }
}

fn min_image_distance(grid: &Grid, a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).enumerate().map(|(ax, (x, y))| grid.min_image(ax, y - x).powi(2)).sum::<f64>().sqrt()
}

fn nearest_neighbour(grid: &Grid, fragments: &[Fragment], i: usize) -> Option<(usize, f64)> {
    (0..fragments.len())
        .filter(|&j| j != i)
        .map(|j| (j, min_image_distance(grid, &fragments[i].centroid, &fragments[j].centroid)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

fn nearest_pairs(grid: &Grid, fragments: &[Fragment]) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..fragments.len())
        .filter_map(|i| nearest_neighbour(grid, fragments, i).map(|(j, _)| (i.min(j), i.max(j))))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Connected components of the superlevel set with per-component moments.
pub fn detect_fragments(density: &Field, policy: ThresholdPolicy) -> Result<FragmentReport> {
    let threshold = policy.level(density);
    let (fragments, _) = components(density, threshold)?;
    let grid = &density.grid;
    let total_mass = density.integral();
    let captured: f64 = fragments.iter().map(|f| f.particle_count).sum();
    let below = density.values.iter().filter(|&&v| v <= threshold).sum::<f64>() * grid.cell_volume();
    let spacing = (fragments.len() >= 2).then(|| {
        let nn: Vec<f64> =
            (0..fragments.len()).filter_map(|i| nearest_neighbour(grid, &fragments, i).map(|(_, r)| r)).collect();
        SpacingStats { mean: stats::mean(&nn), median: stats::median(&nn) }
    });
    Ok(FragmentReport {
        fragments,
        spacing,
        tunneling: Vec::new(),
        threshold,
        total_mass,
        below_threshold_mass: below,
        captured_fraction: if total_mass > 0.0 { captured / total_mass } else { 0.0 },
    })
}

/// Fragment id of every grid point, `None` at or below `threshold`. Ids match the order
/// of [`detect_fragments`] at the same level.
pub fn fragment_labels(density: &Field, threshold: f64) -> Result<Vec<Option<usize>>> {
    components(density, threshold).map(|(_, labels)| labels)
}

fn components(density: &Field, threshold: f64) -> Result<(Vec<Fragment>, Vec<Option<usize>>)> {
    if let Some(&v) = density.values.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::NegativeDensity(v));
    }
    let grid = &density.grid;
    let d = grid.dimension();
    let above: Vec<bool> = density.values.iter().map(|&v| v > threshold).collect();
    let mut labels: Vec<Option<usize>> = vec![None; grid.len()];
    let mut offsets: Vec<Vec<i64>> = vec![Vec::new(); grid.len()];
    let mut coords = vec![0usize; d];
    let mut queue = VecDeque::new();
    let mut fragments = Vec::new();

    for start in 0..grid.len() {
        if !above[start] || labels[start].is_some() {
            continue;
        }
        let label = fragments.len();
        // unwrapped integer coordinates of every member
        let mut members: Vec<(usize, Vec<i64>)> = Vec::new();
        let mut percolating = false;
        grid.coords_into(start, &mut coords);
        labels[start] = Some(label);
        offsets[start] = coords.iter().map(|&c| c as i64).collect();
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let here = offsets[i].clone();
            for axis in 0..d {
                for step in [-1i64, 1] {
                    let mut next = here.clone();
                    next[axis] += step;
                    let n = grid.shape[axis] as i64;
                    if !grid.periodic[axis] && !(0..n).contains(&next[axis]) {
                        continue;
                    }
                    let wrapped: Vec<usize> =
                        next.iter().zip(&grid.shape).map(|(&c, &n)| c.rem_euclid(n as i64) as usize).collect();
                    let j = index_of(grid, &wrapped);
                    if !above[j] {
                        continue;
                    }
                    if labels[j].is_some() {
                        percolating |= offsets[j] != next;
                    } else {
                        labels[j] = Some(label);
                        offsets[j] = next;
                        queue.push_back(j);
                    }
                }
            }
            members.push((i, here));
        }
        fragments.push(moments(density, &members, percolating));
    }

    let mut order: Vec<usize> = (0..fragments.len()).collect();
    order.sort_by(|&a, &b| {
        let (a, b) = (&fragments[a], &fragments[b]);
        b.particle_count.total_cmp(&a.particle_count).then_with(|| {
            a.centroid.iter().zip(&b.centroid).fold(std::cmp::Ordering::Equal, |o, (x, y)| o.then(x.total_cmp(y)))
        })
    });
    let mut rank = vec![0; order.len()];
    for (id, &old) in order.iter().enumerate() {
        rank[old] = id;
    }
    let mut sorted: Vec<Fragment> = order.iter().map(|&i| fragments[i].clone()).collect();
    for (id, f) in sorted.iter_mut().enumerate() {
        f.id = id;
    }
    labels.iter_mut().for_each(|l| *l = l.map(|old| rank[old]));
    Ok((sorted, labels))
}

fn index_of(grid: &Grid, coords: &[usize]) -> usize {
    coords.iter().zip(grid.strides()).map(|(c, s)| c * s).sum()
}

fn moments(density: &Field, members: &[(usize, Vec<i64>)], percolating: bool) -> Fragment {
    let grid = &density.grid;
    let d = grid.dimension();
    let cell = grid.cell_volume();
    let mass: f64 = members.iter().map(|(i, _)| density.values[*i]).sum();
    let peak = members.iter().map(|(i, _)| density.values[*i]).fold(0.0, f64::max);
    let centroid: Vec<f64> = if percolating {
        // unwrapped coordinates are ambiguous; use the circular mean per axis
        (0..d)
            .map(|a| {
                let l = grid.extent(a);
                let (mut s, mut c) = (0.0, 0.0);
                for (i, x) in members {
                    let phase = 2.0 * std::f64::consts::PI * x[a] as f64 * grid.spacing[a] / l;
                    s += density.values[*i] * phase.sin();
                    c += density.values[*i] * phase.cos();
                }
                (s.atan2(c) / (2.0 * std::f64::consts::PI) * l).rem_euclid(l)
            })
            .collect()
    } else {
        (0..d)
            .map(|a| members.iter().map(|(i, x)| density.values[*i] * x[a] as f64).sum::<f64>() / mass * grid.spacing[a])
            .collect()
    };
    let r2 = members
        .iter()
        .map(|(i, x)| {
            let dist2: f64 = (0..d)
                .map(|a| {
                    let dx = x[a] as f64 * grid.spacing[a] - centroid[a];
                    if percolating { grid.min_image(a, dx) } else { dx }.powi(2)
                })
                .sum();
            density.values[*i] * dist2
        })
        .sum::<f64>()
        / mass;
    Fragment {
        id: 0,
        centroid: centroid.iter().enumerate().map(|(a, c)| c.rem_euclid(grid.extent(a))).collect(),
        rms_radius: r2.sqrt(),
        particle_count: mass * cell,
        peak_density: peak,
        cells: members.len(),
        percolating,
    }
}

/// Multilinear interpolation; periodic axes wrap and open axes clamp.
fn interpolate(field: &Field, x: &[f64]) -> f64 {
    let grid = &field.grid;
    let d = grid.dimension();
    let strides = grid.strides();
    let mut base = vec![0usize; d];
    let mut next = vec![0usize; d];
    let mut frac = vec![0.0; d];
    for a in 0..d {
        let n = grid.shape[a];
        let s = x[a] / grid.spacing[a];
        if grid.periodic[a] {
            let f = s.floor();
            base[a] = (f as i64).rem_euclid(n as i64) as usize;
            next[a] = (base[a] + 1) % n;
            frac[a] = s - f;
        } else {
            let s = s.clamp(0.0, (n - 1) as f64);
            base[a] = (s.floor() as usize).min(n - 2);
            next[a] = base[a] + 1;
            frac[a] = s - base[a] as f64;
        }
    }
    let mut value = 0.0;
    for corner in 0..(1usize << d) {
        let mut w = 1.0;
        let mut idx = 0;
        for a in 0..d {
            let hi = corner >> a & 1 == 1;
            w *= if hi { frac[a] } else { 1.0 - frac[a] };
            idx += strides[a] * if hi { next[a] } else { base[a] };
        }
        value += w * field.values[idx];
    }
    value
}

/// Semiclassical amplitude `exp(−(1/ħ)∫√(2m·max(0, U − μ)) dl)` along the straight
/// minimum-image segment between two points, by the trapezoid rule at half-cell steps.
/// Endpoints are put in canonical order first, so the result is exactly symmetric.
pub fn wkb_tunneling(potential: &Field, mu: f64, a: &[f64], b: &[f64], mass: f64, hbar: f64) -> f64 {
    let grid = &potential.grid;
    let (start, end) = if a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()) == Some(std::cmp::Ordering::Greater) {
        (b, a)
    } else {
        (a, b)
    };
    let delta: Vec<f64> = start.iter().zip(end).enumerate().map(|(ax, (x, y))| grid.min_image(ax, y - x)).collect();
    let length = delta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if length == 0.0 {
        return 1.0;
    }
    let h = grid.spacing.iter().copied().fold(f64::INFINITY, f64::min);
    let steps = ((2.0 * length / h).ceil() as usize).max(2);
    let mut point = vec![0.0; start.len()];
    let momentum = |s: f64, point: &mut Vec<f64>| {
        for (p, (x, dx)) in point.iter_mut().zip(start.iter().zip(&delta)) {
            *p = x + s * dx;
        }
        (2.0 * mass * (interpolate(potential, point) - mu).max(0.0)).sqrt()
    };
    let mut integral = 0.5 * (momentum(0.0, &mut point) + momentum(1.0, &mut point));
    for k in 1..steps {
        integral += momentum(k as f64 / steps as f64, &mut point);
    }
    integral *= length / steps as f64;
    (-integral / hbar).exp()
}

/// Fragment reports of every seed at one density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub density: f64,
    pub reports: Vec<FragmentReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub min_points: usize,
    pub min_seeds: usize,
    pub confidence: f64,
    /// Fraction of seeds that must show a single percolating fragment at `n ≥ n_c`.
    pub percolation_fraction: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self { min_points: 4, min_seeds: 20, confidence: 0.95, percolation_fraction: 0.8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub density: f64,
    pub seeds: usize,
    pub median_count: f64,
    /// Median over seeds of the per-seed median rms radius.
    pub median_radius: f64,
    /// Median over seeds of (median spacing)/(median rms radius); NaN when no seed has
    /// two fragments.
    pub median_spacing_ratio: f64,
    pub percolating_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rows: Vec<SweepRow>,
    /// Median radius against `1/ln(n_c/n)` over points with `n < n_c/e`.
    pub radius_fit: Option<LinearFit>,
    pub radius_slope_interval: Option<(f64, f64)>,
    /// Median spacing ratio against `(n_c/n)^{1/d}` over points with `n < n_c/e`.
    pub spacing_fit: Option<LinearFit>,
    pub spacing_slope_interval: Option<(f64, f64)>,
    pub confidence: f64,
    /// Median fragment count never rises as `n` increases.
    pub count_nonincreasing: bool,
    /// Median spacing ratio rises as `n` decreases, over points below `n_c`.
    pub spacing_ratio_monotone: bool,
    /// Lower end of the spacing slope interval is positive.
    pub spacing_slope_positive: bool,
    /// Every point with `n ≥ n_c` percolates in the required fraction of seeds; `None`
    /// when the sweep has no such point.
    pub percolates_above_critical: Option<bool>,
}

/// Trends of fragment geometry with density. Points must be given for a fixed set of
/// disorder seeds.
pub fn fragmentation_scaling(
    points: &[SweepPoint],
    critical_density: f64,
    dimension: usize,
    config: &ScalingConfig,
) -> Result<ScalingReport> {
    let n_c = positive("critical_density", critical_density)?;
    let deep: Vec<&SweepPoint> = points.iter().filter(|p| p.density < n_c / std::f64::consts::E).collect();
    if deep.len() < config.min_points {
        return Err(Error::InsufficientSweep(format!(
            "{} density points below n_c/e, need {}",
            deep.len(),
            config.min_points
        )));
    }
    if let Some(p) = points.iter().find(|p| p.reports.len() < config.min_seeds) {
        return Err(Error::InsufficientSweep(format!(
            "{} seeds at n = {}, need {}",
            p.reports.len(),
            p.density,
            config.min_seeds
        )));
    }
    let mut sorted: Vec<&SweepPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.density.total_cmp(&b.density));
    let rows: Vec<SweepRow> = sorted.iter().map(|p| summarize(p)).collect();

    let fit_rows: Vec<&SweepRow> = rows.iter().filter(|r| r.density < n_c / std::f64::consts::E).collect();
    let radius_pts: Vec<(f64, f64)> = fit_rows
        .iter()
        .filter(|r| r.median_radius.is_finite())
        .map(|r| (1.0 / (n_c / r.density).ln(), r.median_radius))
        .collect();
    let spacing_pts: Vec<(f64, f64)> = fit_rows
        .iter()
        .filter(|r| r.median_spacing_ratio.is_finite())
        .map(|r| ((n_c / r.density).powf(1.0 / dimension as f64), r.median_spacing_ratio))
        .collect();
    let fit = |pts: &[(f64, f64)]| {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
        stats::linear_fit(&x, &y)
    };
    let radius_fit = fit(&radius_pts);
    let spacing_fit = fit(&spacing_pts);
    let spacing_slope_interval = spacing_fit.map(|f| f.slope_interval(config.confidence));

    let count_nonincreasing = rows.windows(2).all(|w| w[1].median_count <= w[0].median_count);
    let below: Vec<&SweepRow> = rows.iter().filter(|r| r.density < n_c && r.median_spacing_ratio.is_finite()).collect();
    let spacing_ratio_monotone = below.len() >= 2 && below.windows(2).all(|w| w[0].median_spacing_ratio > w[1].median_spacing_ratio);
    let above: Vec<&SweepRow> = rows.iter().filter(|r| r.density >= n_c).collect();
    let percolates_above_critical =
        (!above.is_empty()).then(|| above.iter().all(|r| r.percolating_fraction >= config.percolation_fraction));

    Ok(ScalingReport {
        radius_slope_interval: radius_fit.map(|f| f.slope_interval(config.confidence)),
        radius_fit,
        spacing_slope_positive: spacing_slope_interval.is_some_and(|(lo, _)| lo > 0.0),
        spacing_slope_interval,
        spacing_fit,
        confidence: config.confidence,
        count_nonincreasing,
        spacing_ratio_monotone,
        percolates_above_critical,
        rows,
    })
}

fn summarize(point: &SweepPoint) -> SweepRow {
    let counts: Vec<f64> = point.reports.iter().map(|r| r.len() as f64).collect();
    let radii: Vec<f64> = point.reports.iter().filter_map(|r| r.median_rms_radius()).collect();
    let ratios: Vec<f64> = point
        .reports
        .iter()
        .filter_map(|r| Some(r.spacing?.median / r.median_rms_radius()?))
        .filter(|v| v.is_finite())
        .collect();
    let percolating = point.reports.iter().filter(|r| r.single_percolating()).count();
    SweepRow {
        density: point.density,
        seeds: point.reports.len(),
        median_count: stats::median(&counts),
        median_radius: stats::median(&radii),
        median_spacing_ratio: stats::median(&ratios),
        percolating_fraction: percolating as f64 / point.reports.len().max(1) as f64,
    }
}
