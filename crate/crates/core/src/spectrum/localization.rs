//! Geometry of normalized modes: participation and spatial extent.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Field;

/// Accepted deviation of `Σ|ψ|² h^d` from one.
pub const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationMetrics {
    /// `Σ|ψ|⁴ h^d`.
    pub ipr: f64,
    pub participation_volume: f64,
    /// Root-mean-square distance from the density centroid (minimum image on periodic axes).
    pub rms_radius: f64,
    pub centroid: Vec<f64>,
}

/// Centroid of a nonnegative weight on the grid: circular mean on periodic axes.
pub fn weighted_centroid(weights: &Field) -> Vec<f64> {
    let grid = &weights.grid;
    let d = grid.dimension();
    let mut sums = vec![(0.0, 0.0); d];
    let mut total = 0.0;
    let mut coords = vec![0; d];
    for (i, &w) in weights.values.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        grid.coords_into(i, &mut coords);
        total += w;
        for a in 0..d {
            let x = coords[a] as f64 * grid.spacing[a];
            if grid.periodic[a] {
                let phase = 2.0 * PI * x / grid.extent(a);
                sums[a].0 += w * phase.cos();
                sums[a].1 += w * phase.sin();
            } else {
                sums[a].0 += w * x;
            }
        }
    }
    (0..d)
        .map(|a| {
            if grid.periodic[a] {
                let l = grid.extent(a);
                (sums[a].1.atan2(sums[a].0) * l / (2.0 * PI)).rem_euclid(l)
            } else {
                sums[a].0 / total
            }
        })
        .collect()
}

/// Root-mean-square minimum-image distance of the weight from `center`.
pub fn rms_radius_about(weights: &Field, center: &[f64]) -> f64 {
    let grid = &weights.grid;
    let d = grid.dimension();
    let mut coords = vec![0; d];
    let (mut acc, mut total) = (0.0, 0.0);
    for (i, &w) in weights.values.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        grid.coords_into(i, &mut coords);
        let r2: f64 = (0..d)
            .map(|a| grid.min_image(a, coords[a] as f64 * grid.spacing[a] - center[a]).powi(2))
            .sum();
        acc += w * r2;
        total += w;
    }
    (acc / total).sqrt()
}

pub fn localization_metrics(mode: &Field) -> Result<LocalizationMetrics> {
    let norm = mode.norm_sq();
    if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
        return Err(Error::UnnormalizedInput(norm));
    }
    let cell = mode.grid.cell_volume();
    let density = Field { grid: mode.grid.clone(), values: mode.values.iter().map(|v| v * v).collect() };
    let ipr = density.values.iter().map(|p| p * p).sum::<f64>() * cell;
    let centroid = weighted_centroid(&density);
    let rms_radius = rms_radius_about(&density, &centroid);
    Ok(LocalizationMetrics { ipr, participation_volume: 1.0 / ipr, rms_radius, centroid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_and_single_site() {
        let grid = Grid::cubic(2, 16, 0.5).unwrap();
        let uniform = Field::constant(&grid, 1.0 / grid.volume().sqrt());
        let m = localization_metrics(&uniform).unwrap();
        assert_relative_eq!(m.participation_volume, grid.volume(), max_relative = 1e-12);
        let mut single = Field::zeros(&grid);
        single.values[37] = 1.0 / grid.cell_volume().sqrt();
        let m = localization_metrics(&single).unwrap();
        assert_relative_eq!(m.participation_volume, grid.cell_volume(), max_relative = 1e-12);
        assert_eq!(m.rms_radius, 0.0);
        assert!(matches!(localization_metrics(&Field::constant(&grid, 1.0)), Err(Error::UnnormalizedInput(_))));
    }

    #[test]
    fn gaussian_mode_radius_across_the_seam() {
        let grid = Grid::cubic(2, 64, 0.25).unwrap();
        let sigma = 1.0;
        // centred on the periodic seam to exercise the circular mean
        let mut psi = Field::from_fn(&grid, |x| {
            let r2: f64 = x.iter().map(|&c| grid.min_image(0, c - 0.1).powi(2)).sum();
            (-r2 / (4.0 * sigma * sigma)).exp()
        });
        let n = psi.norm_sq();
        psi.scale(1.0 / n.sqrt());
        let m = localization_metrics(&psi).unwrap();
        assert_relative_eq!(m.rms_radius, sigma * 2f64.sqrt(), max_relative = 1e-6);
        assert!((m.centroid[0] - 0.1).abs() < 1e-9);
    }
}
