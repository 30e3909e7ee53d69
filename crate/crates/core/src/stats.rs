//! Small statistics toolbox: resampling errors, regressions and rank correlation.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance.
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() as f64 - 1.0)
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// Linear-interpolation quantile of unsorted data; `NaN` for an empty slice.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = p.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Mean and jackknife standard error; for a plain mean this equals `s/√n`.
pub fn jackknife_mean(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let m = mean(values);
    if n < 2 {
        return (m, f64::NAN);
    }
    let total: f64 = values.iter().sum();
    let loo: Vec<f64> = values.iter().map(|v| (total - v) / (n - 1) as f64).collect();
    (m, jackknife_spread(&loo))
}

/// Ratio of means `Σa/Σb` and its jackknife standard error.
pub fn jackknife_ratio(num: &[f64], den: &[f64]) -> (f64, f64) {
    let (sa, sb): (f64, f64) = (num.iter().sum(), den.iter().sum());
    let ratio = sa / sb;
    if num.len() < 2 {
        return (ratio, f64::NAN);
    }
    let loo: Vec<f64> = num.iter().zip(den).map(|(a, b)| (sa - a) / (sb - b)).collect();
    (ratio, jackknife_spread(&loo))
}

fn jackknife_spread(leave_one_out: &[f64]) -> f64 {
    let n = leave_one_out.len() as f64;
    let m = mean(leave_one_out);
    ((n - 1.0) / n * leave_one_out.iter().map(|v| (v - m).powi(2)).sum::<f64>()).sqrt()
}

/// Two-sided Student-t critical value for `confidence` and `dof` degrees of freedom.
pub fn t_critical(confidence: f64, dof: f64) -> f64 {
    let t = StudentsT::new(0.0, 1.0, dof.max(1.0)).expect("valid Student-t parameters");
    t.inverse_cdf(0.5 + confidence / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_error: f64,
    pub intercept_error: f64,
    /// Weighted residual sum of squares.
    pub rss: f64,
    pub dof: usize,
}

impl LinearFit {
    /// Two-sided confidence interval on the slope.
    pub fn slope_interval(&self, confidence: f64) -> (f64, f64) {
        let t = t_critical(confidence, self.dof as f64);
        (self.slope - t * self.slope_error, self.slope + t * self.slope_error)
    }
}

/// Weighted least squares for `y = a + b x`. Errors are scaled by the residual variance,
/// so the weights only need to be relative.
pub fn weighted_linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 3 || y.len() != n || w.len() != n {
        return None;
    }
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(x, w)| w * (x - xm).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((x, y), w)| w * (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = x.iter().zip(y).zip(w).map(|((x, y), w)| w * (y - intercept - slope * x).powi(2)).sum();
    let dof = n - 2;
    let s2 = rss / dof as f64;
    Some(LinearFit {
        slope,
        intercept,
        slope_error: (s2 / sxx).sqrt(),
        intercept_error: (s2 * (1.0 / sw + xm * xm / sxx)).sqrt(),
        rss,
        dof,
    })
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    weighted_linear_fit(x, y, &vec![1.0; x.len()])
}

/// Ranks with ties sharing their average rank.
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankCorrelation {
    pub rho: f64,
    /// One-sided p-value for `ρ > 0` from the t approximation.
    pub p_positive: f64,
    pub n: usize,
}

pub fn spearman(x: &[f64], y: &[f64]) -> RankCorrelation {
    let n = x.len();
    let rho = pearson(&ranks(x), &ranks(y));
    let dof = n as f64 - 2.0;
    let p_positive = if rho >= 1.0 {
        0.0
    } else {
        let t = rho * (dof / (1.0 - rho * rho)).sqrt();
        1.0 - StudentsT::new(0.0, 1.0, dof.max(1.0)).expect("valid Student-t parameters").cdf(t)
    };
    RankCorrelation { rho, p_positive, n }
}
