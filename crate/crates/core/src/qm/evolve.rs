//! Time evolution: Strang split-step on periodic grids, exact eigenbasis
//! propagation on (small) hard-wall grids.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::fft::{wavenumbers, FftNd};
use super::hamiltonian::HamiltonianSpec;
use super::ops::HamiltonianOperator;
use super::wavefunction::WaveFunction;
use crate::linalg::{LinearOperator, DEFAULT_DIMENSION_CAP};
use crate::{Error, Result};

/// Precomputed phase factors for one Strang step
/// `e^{-iVτ/2} e^{-iCτ/2} e^{-iGτ/2} e^{-iTτ} e^{-iGτ/2} e^{-iCτ/2} e^{-iVτ/2}`
/// where `C` is the internal coupling and `G` the momentum coupling.
pub struct SplitStepPropagator {
    dt: f64,
    fft: FftNd,
    npts: usize,
    components: usize,
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    half_coupling: Option<Vec<Complex64>>,
    half_momentum: Option<(usize, Vec<Complex64>)>,
}

impl SplitStepPropagator {
    pub fn new(psi: &WaveFunction, h: &HamiltonianSpec, dt: f64) -> Result<Self> {
        let grid = psi.grid();
        if !grid.is_periodic() {
            return Err(Error::Unsupported(
                "split-step evolution needs a periodic grid; use the eigenbasis propagator".into(),
            ));
        }
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::invalid("time step must be finite and nonzero"));
        }
        grid.require_evolution_size()?;
        h.validate(grid, psi.components())?;
        let hbar = h.hbar;
        let n = grid.points();
        let shape = grid.shape();
        let npts = grid.total_points();
        let k = wavenumbers(n, grid.spacing());
        let half_potential = h
            .potential
            .iter()
            .map(|v| Complex64::from_polar(1.0, -v * dt / (2.0 * hbar)))
            .collect();
        let kinetic = (0..npts)
            .map(|p| {
                let idx = grid.unflatten(p);
                let e: f64 = (0..grid.dim())
                    .map(|a| hbar * hbar * k[idx[a]].powi(2) / (2.0 * h.masses[a]))
                    .sum();
                Complex64::from_polar(1.0, -e * dt / hbar)
            })
            .collect();
        let half_coupling = h
            .internal_coupling
            .as_ref()
            .map(|c| unitary_exp(c, psi.components(), -dt / (2.0 * hbar)));
        let half_momentum = h.momentum_coupling.map(|mc| {
            // exp(-i g x_s k_t τ/2) in the (x_s, k_t) mixed representation
            let phases = (0..npts)
                .map(|p| {
                    let idx = grid.unflatten(p);
                    let xs = grid.coord(idx[mc.source_axis]);
                    let kt = k[idx[mc.target_axis]];
                    Complex64::from_polar(1.0, -mc.strength * xs * kt * dt / 2.0)
                })
                .collect();
            (mc.target_axis, phases)
        });
        Ok(SplitStepPropagator {
            dt,
            fft: FftNd::new(&shape),
            npts,
            components: psi.components(),
            half_potential,
            kinetic,
            half_coupling,
            half_momentum,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn potential_half(&self, amps: &mut [Complex64]) {
        for c in 0..self.components {
            for (z, f) in amps[c * self.npts..(c + 1) * self.npts].iter_mut().zip(&self.half_potential) {
                *z *= f;
            }
        }
        if let Some(u) = &self.half_coupling {
            let s = self.components;
            let mut tmp = vec![Complex64::new(0.0, 0.0); s];
            for p in 0..self.npts {
                for (a, t) in tmp.iter_mut().enumerate() {
                    *t = (0..s).map(|b| u[a * s + b] * amps[b * self.npts + p]).sum();
                }
                for a in 0..s {
                    amps[a * self.npts + p] = tmp[a];
                }
            }
        }
    }

    fn momentum_half(&self, amps: &mut [Complex64]) {
        if let Some((axis, phases)) = &self.half_momentum {
            for c in 0..self.components {
                let buf = &mut amps[c * self.npts..(c + 1) * self.npts];
                self.fft.forward_axis(buf, *axis);
                buf.iter_mut().zip(phases).for_each(|(z, f)| *z *= f);
                self.fft.inverse_axis(buf, *axis);
            }
        }
    }

    /// Advances `psi` in place by one step.
    pub fn step(&self, psi: &mut WaveFunction) {
        let amps = psi.amplitudes_mut();
        self.potential_half(amps);
        self.momentum_half(amps);
        for c in 0..self.components {
            let buf = &mut amps[c * self.npts..(c + 1) * self.npts];
            self.fft.forward(buf);
            buf.iter_mut().zip(&self.kinetic).for_each(|(z, f)| *z *= f);
            self.fft.inverse(buf);
        }
        self.momentum_half(amps);
        self.potential_half(amps);
        let t = psi.time() + self.dt;
        psi.set_time(t);
    }

    pub fn run(&self, psi: &mut WaveFunction, steps: usize) -> Result<()> {
        for i in 0..steps {
            self.step(psi);
            if (i + 1) % 256 == 0 || i + 1 == steps {
                check_finite(psi)?;
            }
        }
        Ok(())
    }
}

fn check_finite(psi: &WaveFunction) -> Result<()> {
    if psi.amplitudes().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Diverged { time: psi.time() });
    }
    Ok(())
}

/// `exp(i s M)` for a Hermitian `s × s` matrix (row-major).
fn unitary_exp(m: &[Complex64], s: usize, scale: f64) -> Vec<Complex64> {
    let mat = DMatrix::from_fn(s, s, |i, j| m[i * s + j]);
    let eig = mat.symmetric_eigen();
    let mut out = vec![Complex64::new(0.0, 0.0); s * s];
    for i in 0..s {
        for j in 0..s {
            out[i * s + j] = (0..s)
                .map(|k| {
                    eig.eigenvectors[(i, k)]
                        * Complex64::from_polar(1.0, scale * eig.eigenvalues[k])
                        * eig.eigenvectors[(j, k)].conj()
                })
                .sum();
        }
    }
    out
}

/// Strang split-step evolution over `steps` steps of size `dt`.
pub fn evolve_split_step(psi: &WaveFunction, h: &HamiltonianSpec, dt: f64, steps: usize) -> Result<WaveFunction> {
    let prop = SplitStepPropagator::new(psi, h, dt)?;
    let mut out = psi.clone();
    prop.run(&mut out, steps)?;
    Ok(out)
}

/// Exact propagation in the dense eigenbasis of `H`; intended for small
/// hard-wall grids.
pub struct EigenbasisPropagator {
    dt: f64,
    vectors: DMatrix<Complex64>,
    phases: DVector<Complex64>,
}

impl EigenbasisPropagator {
    pub fn new(psi: &WaveFunction, h: &HamiltonianSpec, dt: f64) -> Result<Self> {
        let op = HamiltonianOperator::new(psi.grid(), h, psi.components())?;
        let n = LinearOperator::<Complex64>::dim(&op);
        if n > DEFAULT_DIMENSION_CAP {
            return Err(Error::SizeCap { dimension: n, cap: DEFAULT_DIMENSION_CAP });
        }
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = Complex64::new(1.0, 0.0);
            op.apply(&e, &mut col);
            e[j] = Complex64::new(0.0, 0.0);
            m.column_mut(j).copy_from_slice(&col);
        }
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = m.symmetric_eigen();
        let phases = DVector::from_fn(n, |k, _| Complex64::from_polar(1.0, -eig.eigenvalues[k] * dt / h.hbar));
        Ok(EigenbasisPropagator { dt, vectors: eig.eigenvectors, phases })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, psi: &mut WaveFunction) {
        let coeffs = self.vectors.adjoint() * DVector::from_column_slice(psi.amplitudes());
        let out = &self.vectors * coeffs.component_mul(&self.phases);
        psi.amplitudes_mut().copy_from_slice(out.as_slice());
        let t = psi.time() + self.dt;
        psi.set_time(t);
    }
}

pub fn evolve_eigenbasis(psi: &WaveFunction, h: &HamiltonianSpec, t: f64) -> Result<WaveFunction> {
    let prop = EigenbasisPropagator::new(psi, h, t)?;
    let mut out = psi.clone();
    prop.step(&mut out);
    check_finite(&out)?;
    Ok(out)
}

/// Fixed-step propagator matched to the grid boundary.
pub enum Propagator {
    SplitStep(SplitStepPropagator),
    Eigenbasis(EigenbasisPropagator),
}

impl Propagator {
    pub fn new(psi: &WaveFunction, h: &HamiltonianSpec, dt: f64) -> Result<Self> {
        if psi.grid().is_periodic() {
            SplitStepPropagator::new(psi, h, dt).map(Propagator::SplitStep)
        } else {
            EigenbasisPropagator::new(psi, h, dt).map(Propagator::Eigenbasis)
        }
    }

    pub fn dt(&self) -> f64 {
        match self {
            Propagator::SplitStep(p) => p.dt(),
            Propagator::Eigenbasis(p) => p.dt(),
        }
    }

    pub fn step(&self, psi: &mut WaveFunction) {
        match self {
            Propagator::SplitStep(p) => p.step(psi),
            Propagator::Eigenbasis(p) => p.step(psi),
        }
    }

    /// Steps once and fails with [`Error::Diverged`] on non-finite amplitudes.
    pub fn step_checked(&self, psi: &mut WaveFunction) -> Result<()> {
        self.step(psi);
        check_finite(psi)
    }
}

/// Dispatches on the boundary: split-step for periodic grids, eigenbasis
/// propagation otherwise.
pub fn evolve(psi: &WaveFunction, h: &HamiltonianSpec, dt: f64, steps: usize) -> Result<WaveFunction> {
    if psi.grid().is_periodic() {
        evolve_split_step(psi, h, dt, steps)
    } else {
        evolve_eigenbasis(psi, h, dt * steps as f64)
    }
}
