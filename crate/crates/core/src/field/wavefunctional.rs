use std::f64::consts::PI;

use num_complex::Complex64;

use crate::lattice::{fock_energy, FockState, GaussianWavefunctional, LatticeModel};
use crate::{Error, Result};

/// `Ψ(q) = e^{log_scale}·value` and `∂Ψ/∂q_k = e^{log_scale}·grad_k` in mode
/// coordinates. Splitting off a real scale keeps products of many Gaussian
/// factors representable.
#[derive(Clone, Debug)]
pub struct ScaledAmplitude {
    pub log_scale: f64,
    pub value: Complex64,
    pub grad: Vec<Complex64>,
}

impl ScaledAmplitude {
    /// `ħ Im(Ψ*∂Ψ)/|Ψ|²` per mode.
    pub fn velocity(&self, hbar: f64) -> Vec<f64> {
        let d = self.value.norm_sqr();
        self.grad.iter().map(|g| hbar * (self.value.conj() * g).im / d).collect()
    }
}

/// Normalized Hermite functions without the Gaussian factor:
/// `h̃_n(ξ) = H_n(ξ)/√(2ⁿ n!)`, `n = 0..=max`.
pub fn hermite_normalized(max: usize, xi: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(max + 1);
    h.push(1.0);
    if max >= 1 {
        h.push(std::f64::consts::SQRT_2 * xi);
    }
    for n in 1..max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * xi * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
        h.push(next);
    }
    h
}

/// Superposition of phonon Fock states, `Σ_t c_t |n_t⟩`, in the mode
/// representation: each term is a product of oscillator eigenfunctions and
/// picks up `e^{−iE_t t/ħ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockSuperposition {
    model: LatticeModel,
    terms: Vec<(Complex64, FockState)>,
    energies: Vec<f64>,
    time: f64,
}

impl FockSuperposition {
    /// Coefficients are normalized; repeated states are merged.
    pub fn new(model: &LatticeModel, terms: Vec<(Complex64, FockState)>) -> Result<Self> {
        if model.has_zero_mode() {
            return Err(Error::ZeroMode);
        }
        let mut merged: Vec<(Complex64, FockState)> = Vec::new();
        for (c, s) in terms {
            match merged.iter_mut().find(|(_, t)| *t == s) {
                Some(e) => e.0 += c,
                None => merged.push((c, s)),
            }
        }
        let norm: f64 = merged.iter().map(|(c, _)| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NonNormalizable(norm, 0));
        }
        let energies = merged.iter().map(|(_, s)| fock_energy(model, s)).collect::<Result<Vec<_>>>()?;
        Ok(FockSuperposition {
            model: model.clone(),
            terms: merged.into_iter().map(|(c, s)| (c / norm, s)).collect(),
            energies,
            time: 0.0,
        })
    }

    pub fn terms(&self) -> &[(Complex64, FockState)] {
        &self.terms
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn at_time(&self, time: f64) -> Self {
        FockSuperposition { time, ..self.clone() }
    }

    pub fn amplitude(&self, q: &[f64]) -> Result<ScaledAmplitude> {
        let n = self.model.sites();
        if q.len() != n {
            return Err(Error::Shape(format!("expected {n} mode coordinates")));
        }
        let hbar = self.model.hbar();
        let w = self.model.dispersion();
        let max_n: Vec<usize> = (0..n)
            .map(|k| self.terms.iter().map(|(_, s)| s.occupation(k) as usize).max().unwrap_or(0))
            .collect();
        let herm: Vec<Vec<f64>> = (0..n).map(|k| hermite_normalized(max_n[k], q[k] * (w[k] / hbar).sqrt())).collect();
        let log_scale: f64 = (0..n).map(|k| -w[k] * q[k] * q[k] / (2.0 * hbar) + 0.25 * (w[k] / (PI * hbar)).ln()).sum();
        let mut value = Complex64::new(0.0, 0.0);
        let mut dpoly = vec![Complex64::new(0.0, 0.0); n];
        for ((c, s), e) in self.terms.iter().zip(&self.energies) {
            let ct = c * Complex64::from_polar(1.0, -e * self.time / hbar);
            let factors: Vec<f64> = (0..n).map(|k| herm[k][s.occupation(k) as usize]).collect();
            value += ct * factors.iter().product::<f64>();
            for k in 0..n {
                let nk = s.occupation(k) as usize;
                if nk == 0 {
                    continue;
                }
                let d = (w[k] / hbar).sqrt() * (2.0 * nk as f64).sqrt() * herm[k][nk - 1];
                let others: f64 = (0..n).filter(|&j| j != k).map(|j| factors[j]).product();
                dpoly[k] += ct * d * others;
            }
        }
        let grad = (0..n).map(|k| value * (-w[k] * q[k] / hbar) + dpoly[k]).collect();
        Ok(ScaledAmplitude { log_scale, value, grad })
    }
}

/// Wavefunctionals with a mode-space guidance law.
#[derive(Clone, Debug, PartialEq)]
pub enum Wavefunctional {
    Gaussian(GaussianWavefunctional),
    Fock(FockSuperposition),
}

impl From<GaussianWavefunctional> for Wavefunctional {
    fn from(g: GaussianWavefunctional) -> Self {
        Wavefunctional::Gaussian(g)
    }
}

impl From<FockSuperposition> for Wavefunctional {
    fn from(f: FockSuperposition) -> Self {
        Wavefunctional::Fock(f)
    }
}

impl Wavefunctional {
    pub fn model(&self) -> &LatticeModel {
        match self {
            Wavefunctional::Gaussian(g) => g.model(),
            Wavefunctional::Fock(f) => &f.model,
        }
    }

    pub fn time(&self) -> f64 {
        match self {
            Wavefunctional::Gaussian(g) => g.time(),
            Wavefunctional::Fock(f) => f.time,
        }
    }

    pub fn at_time(&self, time: f64) -> Result<Self> {
        Ok(match self {
            Wavefunctional::Gaussian(g) => Wavefunctional::Gaussian(g.at_time(time)?),
            Wavefunctional::Fock(f) => Wavefunctional::Fock(f.at_time(time)),
        })
    }

    pub fn amplitude(&self, q: &[f64]) -> Result<ScaledAmplitude> {
        match self {
            Wavefunctional::Gaussian(g) => {
                let (l, dl) = g.log_amplitude(q)?;
                let value = Complex64::from_polar(1.0, l.im);
                Ok(ScaledAmplitude { log_scale: l.re, value, grad: dl.iter().map(|d| value * d).collect() })
            }
            Wavefunctional::Fock(f) => f.amplitude(q),
        }
    }

    /// Mode velocities; the classical zero mode (if any) drifts freely.
    pub fn mode_velocity(&self, q: &[f64], node_threshold: f64) -> Result<Vec<f64>> {
        if let Wavefunctional::Gaussian(g) = self {
            return g.mode_velocity(q);
        }
        let a = self.amplitude(q)?;
        let d = a.value.norm_sqr();
        if !(d > node_threshold) {
            return Err(Error::NodeProximity { density: d * (2.0 * a.log_scale).exp() });
        }
        Ok(a.velocity(self.model().hbar()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_functions_are_orthonormal() {
        let h = 0.01;
        let mut gram = [[0.0; 4]; 4];
        for i in -1200..=1200 {
            let xi = i as f64 * h;
            let v = hermite_normalized(3, xi);
            let w = (-xi * xi).exp() / PI.sqrt() * h;
            for a in 0..4 {
                for b in 0..4 {
                    gram[a][b] += v[a] * v[b] * w;
                }
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                assert!((gram[a][b] - if a == b { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn vacuum_fock_state_matches_ground_gaussian() {
        let m = LatticeModel::scalar_field(3, 1.0, 0.7).unwrap();
        let f = Wavefunctional::from(FockSuperposition::new(&m, vec![(Complex64::new(1.0, 0.0), FockState::vacuum())]).unwrap());
        let g = Wavefunctional::from(GaussianWavefunctional::ground(&m));
        let q = [0.3, -0.2, 0.9];
        let (a, b) = (f.amplitude(&q).unwrap(), g.amplitude(&q).unwrap());
        let va = a.value * a.log_scale.exp();
        let vb = b.value * b.log_scale.exp();
        assert!((va - vb).norm() < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let m = LatticeModel::scalar_field(2, 1.0, 1.0).unwrap();
        let f = FockSuperposition::new(
            &m,
            vec![(Complex64::new(1.0, 0.0), FockState::single(0, 1)), (Complex64::new(0.0, 1.0), FockState::single(1, 2))],
        )
        .unwrap()
        .at_time(0.4);
        let psi = |q: &[f64]| {
            let a = f.amplitude(q).unwrap();
            a.value * a.log_scale.exp()
        };
        let q = [0.4, -0.7];
        let a = f.amplitude(&q).unwrap();
        for k in 0..2 {
            let mut p = q;
            let mut m_ = q;
            p[k] += 1e-6;
            m_[k] -= 1e-6;
            let fd = (psi(&p) - psi(&m_)) / 2e-6;
            assert!((fd - a.grad[k] * a.log_scale.exp()).norm() < 1e-8);
        }
    }
}
