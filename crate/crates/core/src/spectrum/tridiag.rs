//! One-dimensional Hamiltonians as (cyclic) tridiagonal matrices: inertia counts and
//! shifted solves.
//!
//! The matrix is split into its leading `(n−1)×(n−1)` tridiagonal block `A`, the border
//! column `B` (the wrap-around link and the last bond) and the corner `D`. Haynsworth's
//! inertia formula gives `ν(H − x) = ν(A − x) + ν(D − x − Bᵀ(A − x)⁻¹B)`.

use super::lanczos::Operator;

pub(crate) struct Chain {
    diag: Vec<f64>,
    off: f64,
    periodic: bool,
}

pub(crate) struct ShiftedFactor {
    pivots: Vec<f64>,
    off: f64,
    border: Vec<f64>,
    z: Vec<f64>,
    schur: f64,
}

impl Chain {
    pub fn new(potential: &[f64], hopping: f64, periodic: bool) -> Self {
        Self { diag: potential.iter().map(|u| u + 2.0 * hopping).collect(), off: -hopping, periodic }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    fn border(&self) -> Vec<f64> {
        let m = self.len() - 1;
        let mut b = vec![0.0; m];
        if self.periodic {
            b[0] += self.off;
        }
        b[m - 1] += self.off;
        b
    }

    /// LDLᵀ pivots of `A − x`; exact zeros are nudged so the count stays defined.
    fn pivots(&self, x: f64) -> Vec<f64> {
        let m = self.len() - 1;
        let tiny = f64::EPSILON * self.off.abs().max(f64::MIN_POSITIVE);
        let mut d = Vec::with_capacity(m);
        let mut prev = 0.0;
        for i in 0..m {
            let mut p = self.diag[i] - x;
            if i > 0 {
                p -= self.off * self.off / prev;
            }
            if p == 0.0 {
                p = -tiny;
            }
            d.push(p);
            prev = p;
        }
        d
    }

    fn solve_leading(pivots: &[f64], off: f64, rhs: &mut [f64]) {
        let m = pivots.len();
        for i in 1..m {
            rhs[i] -= off / pivots[i - 1] * rhs[i - 1];
        }
        rhs[m - 1] /= pivots[m - 1];
        for i in (0..m - 1).rev() {
            rhs[i] = (rhs[i] - off * rhs[i + 1]) / pivots[i];
        }
    }

    fn schur(&self, x: f64, pivots: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let border = self.border();
        let mut z = border.clone();
        Self::solve_leading(pivots, self.off, &mut z);
        let s = self.diag[self.len() - 1] - x - border.iter().zip(&z).map(|(b, z)| b * z).sum::<f64>();
        (border, z, s)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let pivots = self.pivots(x);
        let (_, _, s) = self.schur(x, &pivots);
        pivots.iter().filter(|&&p| p < 0.0).count() + usize::from(s < 0.0)
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().copied().fold(f64::INFINITY, f64::min) - r;
        let hi = self.diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + r;
        (lo, hi)
    }

    /// `j`-th eigenvalue (1-based) by bisection on the inertia count.
    pub fn eigenvalue(&self, j: usize, rel_tol: f64) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        hi += 1e-12 * scale;
        lo -= 1e-12 * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) >= j {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= rel_tol * scale {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Factorization of `H − σ`, available only when it is positive definite.
    pub fn factor(&self, sigma: f64) -> Option<ShiftedFactor> {
        let pivots = self.pivots(sigma);
        if pivots.iter().any(|&p| p <= 0.0) {
            return None;
        }
        let (border, z, schur) = self.schur(sigma, &pivots);
        (schur > 0.0).then_some(ShiftedFactor { pivots, off: self.off, border, z, schur })
    }
}

impl ShiftedFactor {
    /// Solves `(H − σ) x = r`.
    pub fn solve(&self, r: &[f64], x: &mut [f64]) {
        let m = self.pivots.len();
        x[..m].copy_from_slice(&r[..m]);
        Chain::solve_leading(&self.pivots, self.off, &mut x[..m]);
        let last = (r[m] - self.border.iter().zip(&x[..m]).map(|(b, y)| b * y).sum::<f64>()) / self.schur;
        for (xi, zi) in x[..m].iter_mut().zip(&self.z) {
            *xi -= zi * last;
        }
        x[m] = last;
    }
}

impl Operator for ShiftedFactor {
    fn dim(&self) -> usize {
        self.pivots.len() + 1
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.solve(x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn dense(chain: &Chain) -> DMatrix<f64> {
        let n = chain.len();
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = chain.diag[i];
            if i + 1 < n {
                h[(i, i + 1)] = chain.off;
                h[(i + 1, i)] = chain.off;
            }
        }
        if chain.periodic {
            h[(0, n - 1)] += chain.off;
            h[(n - 1, 0)] += chain.off;
        }
        h
    }

    fn sample_chain(periodic: bool) -> Chain {
        let u: Vec<f64> = (0..12).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.8 + (i as f64).sin()).collect();
        Chain::new(&u, 1.3, periodic)
    }

    #[test]
    fn counts_match_dense_spectrum() {
        for periodic in [true, false] {
            let chain = sample_chain(periodic);
            let mut ev: Vec<f64> = SymmetricEigen::new(dense(&chain)).eigenvalues.iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            for (j, &e) in ev.iter().enumerate() {
                assert_eq!(chain.count_below(e - 1e-9), j);
                assert_eq!(chain.count_below(e + 1e-9), j + 1);
                assert!((chain.eigenvalue(j + 1, 1e-15) - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shifted_solve_inverts() {
        let chain = sample_chain(true);
        let sigma = chain.eigenvalue(1, 1e-14) - 0.5;
        let f = chain.factor(sigma).unwrap();
        let r: Vec<f64> = (0..12).map(|i| (i as f64 * 0.3).cos()).collect();
        let mut x = vec![0.0; 12];
        f.solve(&r, &mut x);
        let h = dense(&chain) - DMatrix::identity(12, 12) * sigma;
        let back = h * nalgebra::DVector::from_vec(x);
        for i in 0..12 {
            assert!((back[i] - r[i]).abs() < 1e-12);
        }
        assert!(chain.factor(chain.eigenvalue(1, 1e-14) + 0.1).is_none());
    }
}
