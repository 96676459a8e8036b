use std::f64::consts::PI;

use super::model::LatticeModel;
use crate::{Error, Result};

/// Real orthonormal Fourier basis `E` (site × mode).
///
/// Mode 0 is the constant, `1 ≤ j < N/2` are cosines, `j = N/2` (even `N`)
/// is the alternating mode and `j > N/2` are sines with wavenumber
/// `k_{N−j}`; mode `j` therefore has frequency `ω_j`. Mode coordinates are
/// mass-weighted, `q = √μ Eᵀφ`, so that `H = Σ_j (P_j² + ω_j² q_j²)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeBasis {
    sites: usize,
    inertia: f64,
    /// Row-major `N × N`, `matrix[x * N + j] = E_xj`.
    matrix: Vec<f64>,
}

impl ModeBasis {
    pub fn new(model: &LatticeModel) -> Self {
        let n = model.sites();
        let mut matrix = vec![0.0; n * n];
        let nf = n as f64;
        for x in 0..n {
            for j in 0..n {
                let e = if j == 0 {
                    1.0 / nf.sqrt()
                } else if 2 * j < n {
                    (2.0 / nf).sqrt() * (2.0 * PI * (j * x) as f64 / nf).cos()
                } else if 2 * j == n {
                    (if x % 2 == 0 { 1.0 } else { -1.0 }) / nf.sqrt()
                } else {
                    (2.0 / nf).sqrt() * (2.0 * PI * ((n - j) * x) as f64 / nf).sin()
                };
                matrix[x * n + j] = e;
            }
        }
        ModeBasis { sites: n, inertia: model.inertia(), matrix }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    pub fn element(&self, x: usize, j: usize) -> f64 {
        self.matrix[x * self.sites + j]
    }

    /// `E_xj` continued to a real position `u` in units of the spacing (band-
    /// limited interpolation), with its derivative in `u`.
    pub fn element_at(&self, u: f64, j: usize) -> (f64, f64) {
        let n = self.sites;
        let nf = n as f64;
        let wave = |m: usize| 2.0 * PI * m as f64 / nf;
        if j == 0 {
            (1.0 / nf.sqrt(), 0.0)
        } else if 2 * j < n {
            let (s, c) = (wave(j) * u).sin_cos();
            let a = (2.0 / nf).sqrt();
            (a * c, -a * wave(j) * s)
        } else if 2 * j == n {
            let (s, c) = (PI * u).sin_cos();
            (c / nf.sqrt(), -PI * s / nf.sqrt())
        } else {
            let (s, c) = (wave(n - j) * u).sin_cos();
            let a = (2.0 / nf).sqrt();
            (a * s, a * wave(n - j) * c)
        }
    }

    /// Site-field value and `d/du` at real position `u` from mode coordinates.
    pub fn field_at(&self, q: &[f64], u: f64) -> (f64, f64) {
        let s = self.inertia.sqrt();
        q.iter().enumerate().fold((0.0, 0.0), |(f, d), (j, qj)| {
            let (e, de) = self.element_at(u, j);
            (f + qj * e / s, d + qj * de / s)
        })
    }

    fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.sites {
            return Err(Error::Shape(format!("expected {} values, got {}", self.sites, v.len())));
        }
        Ok(())
    }

    /// Plain (unweighted) mode amplitudes `φ̃ = Eᵀφ`.
    pub fn to_amplitudes(&self, phi: &[f64]) -> Result<Vec<f64>> {
        self.check(phi)?;
        let n = self.sites;
        Ok((0..n).map(|j| (0..n).map(|x| self.matrix[x * n + j] * phi[x]).sum()).collect())
    }

    /// `φ = E φ̃`.
    pub fn from_amplitudes(&self, amp: &[f64]) -> Result<Vec<f64>> {
        self.check(amp)?;
        let n = self.sites;
        Ok((0..n).map(|x| (0..n).map(|j| self.matrix[x * n + j] * amp[j]).sum()).collect())
    }

    /// Mass-weighted mode coordinates `q = √μ Eᵀφ`.
    pub fn to_modes(&self, phi: &[f64]) -> Result<Vec<f64>> {
        let s = self.inertia.sqrt();
        Ok(self.to_amplitudes(phi)?.into_iter().map(|v| v * s).collect())
    }

    /// Site values `φ = E q / √μ`.
    pub fn to_sites(&self, q: &[f64]) -> Result<Vec<f64>> {
        let s = self.inertia.sqrt();
        let amp: Vec<f64> = q.iter().map(|v| v / s).collect();
        self.from_amplitudes(&amp)
    }

    /// Maps mode velocities to site velocities (same linear map as `to_sites`).
    pub fn velocities_to_sites(&self, qdot: &[f64]) -> Result<Vec<f64>> {
        self.to_sites(qdot)
    }
}
