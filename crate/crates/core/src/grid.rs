//! Uniform lattices and real scalar fields on them (row-major, last axis fastest).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of lattice points of a single grid.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl Grid {
    pub fn new(shape: Vec<usize>, spacing: Vec<f64>) -> Result<Self> {
        let periodic = vec![true; shape.len()];
        Self::with_boundaries(shape, spacing, periodic)
    }

    pub fn with_boundaries(shape: Vec<usize>, spacing: Vec<f64>, periodic: Vec<bool>) -> Result<Self> {
        let grid = Self { shape, spacing, periodic };
        grid.validate(DEFAULT_POINT_BUDGET)?;
        Ok(grid)
    }

    /// `d` axes of `n` points with spacing `h`, periodic.
    pub fn cubic(d: usize, n: usize, h: f64) -> Result<Self> {
        Self::new(vec![n; d], vec![h; d])
    }

    pub fn validate(&self, budget: usize) -> Result<()> {
        let d = self.shape.len();
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidDimension(d));
        }
        if self.spacing.len() != d || self.periodic.len() != d {
            return Err(Error::InvalidGrid("shape, spacing and boundary flags differ in length".into()));
        }
        if let Some(n) = self.shape.iter().find(|&&n| n < 8) {
            return Err(Error::InvalidGrid(format!("{n} points on an axis; at least 8 required")));
        }
        if let Some(h) = self.spacing.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
            return Err(Error::InvalidGrid(format!("spacing {h} must be positive")));
        }
        let total = self.shape.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
        match total {
            Some(t) if t <= budget => Ok(()),
            _ => Err(Error::InvalidGrid(format!("point count exceeds the budget of {budget}"))),
        }
    }

    pub fn dimension(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.shape[axis] as f64 * self.spacing[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dimension()).map(|a| self.extent(a)).product()
    }

    pub fn all_periodic(&self) -> bool {
        self.periodic.iter().all(|&p| p)
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dimension()];
        for a in (0..self.dimension().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.shape[a + 1];
        }
        strides
    }

    pub fn index_of(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.shape).fold(0, |acc, (&c, &n)| acc * n + c)
    }

    pub fn coords_into(&self, mut index: usize, out: &mut [usize]) {
        for a in (0..self.dimension()).rev() {
            out[a] = index % self.shape[a];
            index /= self.shape[a];
        }
    }

    pub fn coords_of(&self, index: usize) -> Vec<usize> {
        let mut c = vec![0; self.dimension()];
        self.coords_into(index, &mut c);
        c
    }

    pub fn position(&self, index: usize) -> Vec<f64> {
        self.coords_of(index).iter().zip(&self.spacing).map(|(&c, &h)| c as f64 * h).collect()
    }

    /// Wraps a displacement along `axis` into `[−extent/2, extent/2)` on periodic axes.
    pub fn min_image(&self, axis: usize, dx: f64) -> f64 {
        if !self.periodic[axis] {
            return dx;
        }
        let l = self.extent(axis);
        dx - l * (dx / l).round()
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        (0..self.dimension()).map(|k| self.min_image(k, b[k] - a[k]).powi(2)).sum::<f64>().sqrt()
    }

    /// Largest distance between two points under the minimum-image convention.
    pub fn half_diagonal(&self) -> f64 {
        (0..self.dimension())
            .map(|a| {
                let e = if self.periodic[a] { self.extent(a) / 2.0 } else { self.extent(a) };
                e * e
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch);
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("field value {v} is not finite")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self { values: vec![0.0; grid.len()], grid: grid.clone() }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self { values: vec![value; grid.len()], grid: grid.clone() }
    }

    /// Evaluates `f` at the lattice positions `coords · h`.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let mut pos = vec![0.0; grid.dimension()];
        let mut coords = vec![0; grid.dimension()];
        let values = (0..grid.len())
            .map(|i| {
                grid.coords_into(i, &mut coords);
                for a in 0..coords.len() {
                    pos[a] = coords[a] as f64 * grid.spacing[a];
                }
                f(&pos)
            })
            .collect();
        Self { values, grid: grid.clone() }
    }

    pub fn same_shape(&self, other: &Field) -> bool {
        self.grid.shape == other.grid.shape
    }

    /// `Σ v h^d`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// `Σ v² h^d`.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()
    }

    /// `Σ u v h^d`.
    pub fn inner(&self, other: &Field) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index of the smallest value; ties resolve to the lowest index.
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v < self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn scale(&mut self, factor: f64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
    }

    /// Cyclic shift by `offset` lattice steps per axis.
    pub fn shifted(&self, offset: &[isize]) -> Field {
        let g = &self.grid;
        let mut out = vec![0.0; self.values.len()];
        let mut c = vec![0; g.dimension()];
        for (i, &v) in self.values.iter().enumerate() {
            g.coords_into(i, &mut c);
            for a in 0..c.len() {
                let n = g.shape[a] as isize;
                c[a] = (c[a] as isize + offset[a]).rem_euclid(n) as usize;
            }
            out[g.index_of(&c)] = v;
        }
        Field { grid: g.clone(), values: out }
    }
}
