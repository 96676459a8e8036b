//! Grid operators: kinetic and derivative matrices, gradients, the matrix-free
//! Hamiltonian and its expectation value.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft::{derivative_wavenumbers, wavenumbers, FftNd};
use super::grid::{Boundary, SpatialGrid};
use super::hamiltonian::HamiltonianSpec;
use super::wavefunction::WaveFunction;
use crate::linalg::LinearOperator;
use crate::{Error, Result};

/// Dense 1D kinetic matrix `-(ħ²/2m) d²/dx²` in the grid's spectral basis:
/// plane waves (periodic) or sines vanishing at the walls (hard wall).
pub fn kinetic_matrix(n: usize, spacing: f64, boundary: Boundary, mass: f64, hbar: f64) -> Vec<f64> {
    let c = hbar * hbar / (2.0 * mass);
    let mut t = vec![0.0; n * n];
    match boundary {
        Boundary::Periodic => {
            let k = wavenumbers(n, spacing);
            let kernel: Vec<f64> = (0..n)
                .map(|d| {
                    k.iter()
                        .map(|kk| kk * kk * (kk * d as f64 * spacing).cos())
                        .sum::<f64>()
                        * c
                        / n as f64
                })
                .collect();
            for i in 0..n {
                for j in 0..n {
                    t[i * n + j] = kernel[(i + n - j) % n];
                }
            }
        }
        Boundary::HardWall => {
            let s = sine_basis(n);
            let len = (n + 1) as f64 * spacing;
            let e: Vec<f64> = (1..=n).map(|m| c * (m as f64 * PI / len).powi(2)).collect();
            for i in 0..n {
                for j in 0..=i {
                    let v: f64 = (0..n).map(|m| s[i * n + m] * e[m] * s[j * n + m]).sum();
                    t[i * n + j] = v;
                    t[j * n + i] = v;
                }
            }
        }
    }
    t
}

/// Orthogonal DST-I matrix, `S[j][m] = √(2/(n+1)) sin(π (j+1)(m+1)/(n+1))`.
fn sine_basis(n: usize) -> Vec<f64> {
    let norm = (2.0 / (n + 1) as f64).sqrt();
    let mut s = vec![0.0; n * n];
    for j in 0..n {
        for m in 0..n {
            s[j * n + m] = norm * (PI * ((j + 1) * (m + 1)) as f64 / (n + 1) as f64).sin();
        }
    }
    s
}

/// Dense 1D first-derivative matrix of the grid's spectral interpolant.
pub fn derivative_matrix(n: usize, spacing: f64, boundary: Boundary) -> Vec<f64> {
    let mut d = vec![0.0; n * n];
    match boundary {
        Boundary::Periodic => {
            let k = derivative_wavenumbers(n, spacing);
            // d/dx e^{ik(x_i - x_j)} summed: -(1/n) Σ k sin(k (i-j) dx)
            let kernel: Vec<f64> = (0..n)
                .map(|dd| {
                    -k.iter().map(|kk| kk * (kk * dd as f64 * spacing).sin()).sum::<f64>() / n as f64
                })
                .collect();
            for i in 0..n {
                for j in 0..n {
                    d[i * n + j] = kernel[(i + n - j) % n];
                }
            }
        }
        Boundary::HardWall => {
            let s = sine_basis(n);
            let norm = (2.0 / (n + 1) as f64).sqrt();
            let len = (n + 1) as f64 * spacing;
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.0;
                    for m in 0..n {
                        let km = (m + 1) as f64 * PI / len;
                        let cosv = norm * (PI * ((i + 1) * (m + 1)) as f64 / (n + 1) as f64).cos();
                        v += cosv * km * s[j * n + m];
                    }
                    d[i * n + j] = v;
                }
            }
        }
    }
    d
}

/// Applies a dense `n × n` matrix along one axis of a flat tensor array.
pub(crate) fn apply_along_axis<T>(m: &[f64], n: usize, shape: &[usize], axis: usize, x: &[T], y: &mut [T])
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::AddAssign + Default,
{
    let stride: usize = shape[axis + 1..].iter().product();
    let outer = x.len() / (n * stride);
    for o in 0..outer {
        let base = o * n * stride;
        for s in 0..stride {
            for i in 0..n {
                let mut acc = T::default();
                let row = &m[i * n..(i + 1) * n];
                for (j, mij) in row.iter().enumerate() {
                    if *mij != 0.0 {
                        acc += x[base + j * stride + s] * *mij;
                    }
                }
                y[base + i * stride + s] += acc;
            }
        }
    }
}

/// Spatial gradient of every component: `result[axis]` has the same layout
/// as the wavefunction amplitudes.
pub fn gradient(psi: &WaveFunction) -> Vec<Vec<Complex64>> {
    let grid = psi.grid();
    let n = grid.points();
    let shape = grid.shape();
    let npts = grid.total_points();
    (0..grid.dim())
        .map(|axis| {
            let mut out = vec![Complex64::new(0.0, 0.0); psi.amplitudes().len()];
            match grid.boundary() {
                Boundary::Periodic => {
                    let fft = FftNd::new(&shape);
                    let k = derivative_wavenumbers(n, grid.spacing());
                    let stride: usize = shape[axis + 1..].iter().product();
                    for c in 0..psi.components() {
                        let buf = &mut out[c * npts..(c + 1) * npts];
                        buf.copy_from_slice(psi.component(c));
                        fft.forward_axis(buf, axis);
                        for (p, z) in buf.iter_mut().enumerate() {
                            let j = (p / stride) % n;
                            *z *= Complex64::new(0.0, k[j]);
                        }
                        fft.inverse_axis(buf, axis);
                    }
                }
                Boundary::HardWall => {
                    let d = derivative_matrix(n, grid.spacing(), grid.boundary());
                    for c in 0..psi.components() {
                        apply_along_axis(&d, n, &shape, axis, psi.component(c), &mut out[c * npts..(c + 1) * npts]);
                    }
                }
            }
            out
        })
        .collect()
}

/// Matrix-free `H` acting on flat component-major vectors.
pub struct HamiltonianOperator {
    grid: SpatialGrid,
    components: usize,
    kinetic: Vec<Vec<f64>>,
    potential: Vec<f64>,
    coupling: Option<Vec<Complex64>>,
    momentum: Option<(usize, usize, f64, Vec<f64>)>,
    hbar: f64,
}

impl HamiltonianOperator {
    pub fn new(grid: &SpatialGrid, h: &HamiltonianSpec, components: usize) -> Result<Self> {
        h.validate(grid, components)?;
        let kinetic = h
            .masses
            .iter()
            .map(|&m| kinetic_matrix(grid.points(), grid.spacing(), grid.boundary(), m, h.hbar))
            .collect();
        let momentum = match h.momentum_coupling {
            Some(mc) => {
                if !grid.is_periodic() {
                    return Err(Error::Unsupported(
                        "momentum coupling needs a periodic grid".into(),
                    ));
                }
                let d = derivative_matrix(grid.points(), grid.spacing(), grid.boundary());
                Some((mc.source_axis, mc.target_axis, mc.strength, d))
            }
            None => None,
        };
        Ok(HamiltonianOperator {
            grid: grid.clone(),
            components,
            kinetic,
            potential: h.potential.clone(),
            coupling: h.internal_coupling.clone(),
            momentum,
            hbar: h.hbar,
        })
    }

    /// True when every matrix element is real, so a real eigensolver applies.
    pub fn is_real(&self) -> bool {
        self.momentum.is_none()
            && self
                .coupling
                .as_ref()
                .is_none_or(|c| c.iter().all(|z| z.im == 0.0))
    }

    fn apply_generic<T>(&self, x: &[T], y: &mut [T], couple: impl Fn(&[T], &mut [T]))
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::AddAssign + Default,
    {
        let npts = self.grid.total_points();
        let n = self.grid.points();
        let shape = self.grid.shape();
        y.iter_mut().for_each(|v| *v = T::default());
        for c in 0..self.components {
            let (xs, ys) = (&x[c * npts..(c + 1) * npts], &mut y[c * npts..(c + 1) * npts]);
            for (axis, t) in self.kinetic.iter().enumerate() {
                apply_along_axis(t, n, &shape, axis, xs, ys);
            }
            for p in 0..npts {
                ys[p] += xs[p] * self.potential[p];
            }
        }
        couple(x, y);
    }
}

impl LinearOperator<f64> for HamiltonianOperator {
    fn dim(&self) -> usize {
        self.grid.total_points() * self.components
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let npts = self.grid.total_points();
        let s = self.components;
        self.apply_generic(x, y, |x, y| {
            if let Some(cm) = &self.coupling {
                for a in 0..s {
                    for b in 0..s {
                        let cab = cm[a * s + b].re;
                        if cab != 0.0 {
                            for p in 0..npts {
                                y[a * npts + p] += cab * x[b * npts + p];
                            }
                        }
                    }
                }
            }
        });
    }
}

impl LinearOperator<Complex64> for HamiltonianOperator {
    fn dim(&self) -> usize {
        self.grid.total_points() * self.components
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let npts = self.grid.total_points();
        let s = self.components;
        let n = self.grid.points();
        let shape = self.grid.shape();
        self.apply_generic(x, y, |x, y| {
            if let Some(cm) = &self.coupling {
                for a in 0..s {
                    for b in 0..s {
                        let cab = cm[a * s + b];
                        if cab != Complex64::new(0.0, 0.0) {
                            for p in 0..npts {
                                y[a * npts + p] += cab * x[b * npts + p];
                            }
                        }
                    }
                }
            }
            if let Some((src, tgt, g, d)) = &self.momentum {
                // g x_src (-iħ ∂_tgt)
                for c in 0..s {
                    let mut dx = vec![Complex64::new(0.0, 0.0); npts];
                    apply_along_axis(d, n, &shape, *tgt, &x[c * npts..(c + 1) * npts], &mut dx);
                    for (p, v) in dx.iter().enumerate() {
                        let xs = self.grid.point(p)[*src];
                        y[c * npts + p] += Complex64::new(0.0, -self.hbar) * *v * (g * xs);
                    }
                }
            }
        });
    }
}

/// `⟨ψ|H|ψ⟩` (the wavefunction is assumed normalized).
pub fn energy(psi: &WaveFunction, h: &HamiltonianSpec) -> Result<f64> {
    let op = HamiltonianOperator::new(psi.grid(), h, psi.components())?;
    let mut hpsi = vec![Complex64::new(0.0, 0.0); psi.amplitudes().len()];
    op.apply(psi.amplitudes(), &mut hpsi);
    let e: Complex64 = psi.amplitudes().iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum();
    Ok(e.re * psi.grid().cell_volume())
}
