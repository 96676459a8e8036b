use num_complex::Complex64;

use super::guidance::{FieldConfiguration, FIELD_NODE_THRESHOLD};
use super::wavefunctional::Wavefunctional;
use crate::lattice::ModeBasis;
use crate::{Error, Result};

/// Wavefunctional with an internal, non-ontic index `χ`:
/// `Ψ_χ = Σ_χ' U_χχ' Ψ⁰_χ'`. The guidance law only sees `Σ_χ Ψ*_χ Ψ_χ`
/// and `Σ_χ Ψ*_χ ∂Ψ_χ`, so it cannot depend on the unitary `U`.
#[derive(Clone, Debug)]
pub struct TracedWavefunctional {
    components: Vec<Wavefunctional>,
    /// Row-major `s × s`.
    mixing: Vec<Complex64>,
}

impl TracedWavefunctional {
    pub fn new(components: Vec<Wavefunctional>) -> Result<Self> {
        let s = components.len();
        if s == 0 {
            return Err(Error::invalid("traced wavefunctional needs a component"));
        }
        let n = components[0].model().sites();
        if components.iter().any(|c| c.model().sites() != n) {
            return Err(Error::Shape("components live on different lattices".into()));
        }
        let mut mixing = vec![Complex64::new(0.0, 0.0); s * s];
        for i in 0..s {
            mixing[i * s + i] = Complex64::new(1.0, 0.0);
        }
        Ok(TracedWavefunctional { components, mixing })
    }

    pub fn components(&self) -> usize {
        self.components.len()
    }

    /// Applies a further unitary `u` (row-major) to the component index.
    pub fn rotated(&self, u: &[Complex64]) -> Result<Self> {
        let s = self.components.len();
        if u.len() != s * s {
            return Err(Error::Shape(format!("rotation must be {s}×{s}")));
        }
        for i in 0..s {
            for j in 0..s {
                let dot: Complex64 = (0..s).map(|k| u[k * s + i].conj() * u[k * s + j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot - expect).norm() > 1e-12 {
                    return Err(Error::invalid("component rotation is not unitary"));
                }
            }
        }
        let mut mixing = vec![Complex64::new(0.0, 0.0); s * s];
        for i in 0..s {
            for j in 0..s {
                mixing[i * s + j] = (0..s).map(|k| u[i * s + k] * self.mixing[k * s + j]).sum();
            }
        }
        Ok(TracedWavefunctional { components: self.components.clone(), mixing })
    }

    /// Mode velocities `ħ Im(Σ_χ Ψ*_χ ∂Ψ_χ) / Σ_χ |Ψ_χ|²`.
    pub fn mode_velocity(&self, q: &[f64]) -> Result<Vec<f64>> {
        let amps = self.components.iter().map(|c| c.amplitude(q)).collect::<Result<Vec<_>>>()?;
        let top = amps.iter().map(|a| a.log_scale).fold(f64::NEG_INFINITY, f64::max);
        let n = q.len();
        let s = amps.len();
        let base: Vec<(Complex64, Vec<Complex64>)> = amps
            .iter()
            .map(|a| {
                let f = (a.log_scale - top).exp();
                (a.value * f, a.grad.iter().map(|g| g * f).collect())
            })
            .collect();
        let mut density = 0.0;
        let mut current = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..s {
            let mut v = Complex64::new(0.0, 0.0);
            let mut g = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..s {
                let u = self.mixing[i * s + j];
                v += u * base[j].0;
                for k in 0..n {
                    g[k] += u * base[j].1[k];
                }
            }
            density += v.norm_sqr();
            for k in 0..n {
                current[k] += v.conj() * g[k];
            }
        }
        if !(density > FIELD_NODE_THRESHOLD) {
            return Err(Error::NodeProximity { density: density * (2.0 * top).exp() });
        }
        let hbar = self.components[0].model().hbar();
        Ok(current.iter().map(|c| hbar * c.im / density).collect())
    }
}

/// Site velocity of `Φ` under the component-summed guidance law.
pub fn traced_nonontic_demo(psi: &TracedWavefunctional, phi: &FieldConfiguration) -> Result<Vec<f64>> {
    let model = psi.components[0].model();
    for c in &psi.components {
        crate::bohm::stale_check(phi.time, c.time())?;
    }
    let basis = ModeBasis::new(model);
    let q = basis.to_modes(&phi.values)?;
    basis.to_sites(&psi.mode_velocity(&q)?)
}
