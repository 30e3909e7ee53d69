//! Thick-restart Lanczos for the algebraically largest eigenpairs of a symmetric operator,
//! with full reorthogonalization and locking of accepted pairs.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub(crate) trait Operator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LanczosConfig {
    pub wanted: usize,
    pub keep: usize,
    pub basis: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl LanczosConfig {
    pub fn for_count(wanted: usize, dim: usize, max_restarts: usize) -> Self {
        let keep = (wanted + 8 + wanted / 4).min(dim.saturating_sub(1)).max(wanted);
        let basis = (2 * keep + 8).min(dim).max(keep + 1).min(dim);
        Self { wanted, keep, basis, max_restarts, seed: 0x5eed_1a2c }
    }
}

pub(crate) struct RitzPair {
    pub theta: f64,
    pub vector: Vec<f64>,
}

pub(crate) struct LanczosOutcome {
    /// Accepted pairs, followed (on failure) by the best unaccepted candidates.
    pub pairs: Vec<RitzPair>,
    pub converged: bool,
    pub restarts: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

/// Two passes of classical Gram–Schmidt against every vector in `sets`.
fn orthogonalize(f: &mut [f64], sets: &[&[Vec<f64>]]) {
    for _ in 0..2 {
        for set in sets {
            let coeffs: Vec<f64> = set.iter().map(|q| dot(q, f)).collect();
            for (q, c) in set.iter().zip(coeffs) {
                axpy(-c, q, f);
            }
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize, against: &[&[Vec<f64>]]) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        orthogonalize(&mut v, against);
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return v;
        }
    }
}

fn combine(basis: &[Vec<f64>], coeffs: impl Iterator<Item = f64>, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (b, c) in basis.iter().zip(coeffs) {
        axpy(c, b, &mut out);
    }
    out
}

/// Runs the iteration. `accept(vector, θ, residual)` decides whether a Ritz pair among
/// the wanted ones is converged; `residual` is the exact operator residual `‖Ay − θy‖`.
pub(crate) fn largest_eigenpairs(
    op: &dyn Operator,
    cfg: LanczosConfig,
    accept: &mut dyn FnMut(&[f64], f64, f64) -> bool,
) -> LanczosOutcome {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut locked: Vec<RitzPair> = Vec::new();
    let mut locked_vecs: Vec<Vec<f64>> = Vec::new();

    let mut v_basis: Vec<Vec<f64>> = Vec::new();
    let mut w_basis: Vec<Vec<f64>> = Vec::new();
    let push = |v: Vec<f64>, vb: &mut Vec<Vec<f64>>, wb: &mut Vec<Vec<f64>>| {
        let mut w = vec![0.0; n];
        op.apply(&v, &mut w);
        vb.push(v);
        wb.push(w);
    };
    push(random_unit(&mut rng, n, &[]), &mut v_basis, &mut w_basis);

    let mut best: Vec<RitzPair> = Vec::new();
    for restart in 0..cfg.max_restarts.max(1) {
        let room = n - locked_vecs.len();
        let target = cfg.basis.min(room);
        while v_basis.len() < target {
            let mut f = w_basis.last().expect("basis is never empty").clone();
            let scale = norm(&f);
            orthogonalize(&mut f, &[&locked_vecs, &v_basis]);
            let nf = norm(&f);
            let f = if nf > 1e-10 * scale.max(f64::MIN_POSITIVE) {
                f.into_iter().map(|x| x / nf).collect()
            } else {
                random_unit(&mut rng, n, &[&locked_vecs, &v_basis])
            };
            push(f, &mut v_basis, &mut w_basis);
        }

        let m = v_basis.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let val = 0.5 * (dot(&v_basis[i], &w_basis[j]) + dot(&v_basis[j], &w_basis[i]));
                t[(i, j)] = val;
                t[(j, i)] = val;
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

        let need = cfg.wanted - locked.len();
        let keep = cfg.keep.min(m.saturating_sub(1)).max(need.min(m));
        let mut ritz = Vec::with_capacity(keep);
        for &j in order.iter().take(keep) {
            let col = eig.eigenvectors.column(j);
            let y = combine(&v_basis, col.iter().copied(), n);
            let w = combine(&w_basis, col.iter().copied(), n);
            let theta = eig.eigenvalues[j];
            let res = w.iter().zip(&y).map(|(w, y)| (w - theta * y).powi(2)).sum::<f64>().sqrt();
            ritz.push((theta, y, w, res));
        }

        // residual direction of the Krylov factorization, needed to continue after restart
        let mut f = w_basis.last().expect("basis is never empty").clone();
        let scale = norm(&f);
        orthogonalize(&mut f, &[&locked_vecs, &v_basis]);

        let mut remaining = Vec::new();
        for (idx, (theta, y, w, res)) in ritz.into_iter().enumerate() {
            if idx < need && accept(&y, theta, res) {
                locked_vecs.push(y.clone());
                locked.push(RitzPair { theta, vector: y });
            } else {
                remaining.push((theta, y, w));
            }
        }
        if locked.len() >= cfg.wanted {
            locked.sort_by(|a, b| b.theta.total_cmp(&a.theta));
            return LanczosOutcome { pairs: locked, converged: true, restarts: restart };
        }
        best = remaining
            .iter()
            .take(cfg.wanted - locked.len())
            .map(|(theta, y, _)| RitzPair { theta: *theta, vector: y.clone() })
            .collect();

        v_basis.clear();
        w_basis.clear();
        let room_now = n - locked_vecs.len();
        for (_, y, w) in remaining.into_iter().take(cfg.keep.min(room_now.saturating_sub(1))) {
            v_basis.push(y);
            w_basis.push(w);
        }
        // continuing from the factorization residual keeps every Ritz residual inside the
        // next basis; a random direction is used only after breakdown
        if v_basis.len() + locked_vecs.len() < n {
            orthogonalize(&mut f, &[&locked_vecs, &v_basis]);
            let nf = norm(&f);
            let f = if nf > 1e-10 * scale.max(f64::MIN_POSITIVE) {
                f.into_iter().map(|x| x / nf).collect()
            } else {
                random_unit(&mut rng, n, &[&locked_vecs, &v_basis])
            };
            push(f, &mut v_basis, &mut w_basis);
        }
    }
    locked.extend(best);
    locked.sort_by(|a, b| b.theta.total_cmp(&a.theta));
    LanczosOutcome { pairs: locked, converged: false, restarts: cfg.max_restarts }
}
