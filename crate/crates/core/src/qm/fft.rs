//! Multi-dimensional FFTs on flat row-major buffers (last axis fastest).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct FftNd {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("shape", &self.shape).finish()
    }
}

impl FftNd {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        FftNd {
            shape: shape.to_vec(),
            forward: shape.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform over every axis.
    pub fn forward(&self, data: &mut [Complex64]) {
        for axis in 0..self.shape.len() {
            self.transform_axis(data, axis, false);
        }
    }

    /// Inverse transform over every axis, normalized so that
    /// `inverse(forward(x)) == x`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        for axis in 0..self.shape.len() {
            self.transform_axis(data, axis, true);
        }
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    pub fn forward_axis(&self, data: &mut [Complex64], axis: usize) {
        self.transform_axis(data, axis, false);
    }

    pub fn inverse_axis(&self, data: &mut [Complex64], axis: usize) {
        self.transform_axis(data, axis, true);
        let scale = 1.0 / self.shape[axis] as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    fn transform_axis(&self, data: &mut [Complex64], axis: usize, inverse: bool) {
        let plan = if inverse { &self.inverse[axis] } else { &self.forward[axis] };
        let n = self.shape[axis];
        let stride: usize = self.shape[axis + 1..].iter().product();
        if stride == 1 {
            plan.process(data);
            return;
        }
        let outer = data.len() / (n * stride);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for o in 0..outer {
            let base = o * n * stride;
            for s in 0..stride {
                for (j, z) in line.iter_mut().enumerate() {
                    *z = data[base + j * stride + s];
                }
                plan.process(&mut line);
                for (j, z) in line.iter().enumerate() {
                    data[base + j * stride + s] = *z;
                }
            }
        }
    }
}

/// Angular wavenumbers in FFT order; the Nyquist entry of an even-length
/// axis is negative.
pub fn wavenumbers(n: usize, spacing: f64) -> Vec<f64> {
    let dk = 2.0 * PI / (n as f64 * spacing);
    (0..n)
        .map(|j| {
            let m = if j <= (n - 1) / 2 { j as i64 } else { j as i64 - n as i64 };
            m as f64 * dk
        })
        .collect()
}

/// Wavenumbers used for first derivatives: same as [`wavenumbers`] but with
/// the Nyquist entry zeroed so real fields have real derivatives.
pub fn derivative_wavenumbers(n: usize, spacing: f64) -> Vec<f64> {
    let mut k = wavenumbers(n, spacing);
    if n % 2 == 0 {
        k[n / 2] = 0.0;
    }
    k
}
