//! Separable multi-dimensional complex FFT over a row-major buffer.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct NdFft {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl NdFft {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            shape: shape.to_vec(),
            forward: shape.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    /// Unnormalized forward transform `Σ_x f(x) e^{−iqx}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Unnormalized inverse transform; divide by `len()` to invert `forward`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        assert_eq!(data.len(), self.len());
        let d = self.shape.len();
        let mut stride = 1;
        for axis in (0..d).rev() {
            let n = self.shape[axis];
            let plan = &plans[axis];
            if stride == 1 {
                plan.process(data);
            } else {
                let mut line = vec![Complex64::new(0.0, 0.0); n];
                let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                let block = n * stride;
                for base_hi in (0..data.len()).step_by(block) {
                    for lo in 0..stride {
                        let base = base_hi + lo;
                        for (k, v) in line.iter_mut().enumerate() {
                            *v = data[base + k * stride];
                        }
                        plan.process_with_scratch(&mut line, &mut scratch);
                        for (k, v) in line.iter().enumerate() {
                            data[base + k * stride] = *v;
                        }
                    }
                }
            }
            stride *= n;
        }
    }
}

/// Signed integer frequency index of DFT bin `k` on an axis of `n` points.
pub(crate) fn signed_frequency(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft_2d(data: &[Complex64], n0: usize, n1: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
        for k0 in 0..n0 {
            for k1 in 0..n1 {
                let mut acc = Complex64::new(0.0, 0.0);
                for x0 in 0..n0 {
                    for x1 in 0..n1 {
                        let phase = -2.0
                            * std::f64::consts::PI
                            * ((k0 * x0) as f64 / n0 as f64 + (k1 * x1) as f64 / n1 as f64);
                        acc += data[x0 * n1 + x1] * Complex64::from_polar(1.0, phase);
                    }
                }
                out[k0 * n1 + k1] = acc;
            }
        }
        out
    }

    #[test]
    fn matches_naive_transform_and_inverts() {
        let (n0, n1) = (6, 10);
        let data: Vec<Complex64> =
            (0..n0 * n1).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let fft = NdFft::new(&[n0, n1]);
        let mut buf = data.clone();
        fft.forward(&mut buf);
        let reference = naive_dft_2d(&data, n0, n1);
        for (a, b) in buf.iter().zip(&reference) {
            assert!((a - b).norm() < 1e-10);
        }
        fft.inverse(&mut buf);
        for (a, b) in buf.iter().zip(&data) {
            assert!((a / (n0 * n1) as f64 - b).norm() < 1e-13);
        }
    }

    #[test]
    fn signed_frequencies() {
        assert_eq!(signed_frequency(3, 8), 3.0);
        assert_eq!(signed_frequency(4, 8), 4.0);
        assert_eq!(signed_frequency(5, 8), -3.0);
    }
}
