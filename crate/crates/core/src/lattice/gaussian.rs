use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::model::LatticeModel;
use super::modes::ModeBasis;
use crate::{Error, Result};

/// One Gaussian factor `exp(−Ω(q − q_c)²/2ħ + i p_c (q − q_c)/ħ)` in a
/// mass-weighted mode coordinate of frequency `ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeGaussian {
    pub omega: f64,
    pub width: Complex64,
    pub center: f64,
    pub momentum: f64,
}

impl ModeGaussian {
    pub fn ground(omega: f64) -> Self {
        ModeGaussian { omega, width: Complex64::new(omega, 0.0), center: 0.0, momentum: 0.0 }
    }

    /// Coherent amplitude `α = (ω q_c + i p_c)/√(2ħω)`.
    pub fn alpha(&self, hbar: f64) -> Complex64 {
        Complex64::new(self.omega * self.center, self.momentum) / (2.0 * hbar * self.omega).sqrt()
    }

    /// Position variance `ħ/(2 Re Ω)`.
    pub fn variance(&self, hbar: f64) -> f64 {
        hbar / (2.0 * self.width.re)
    }

    /// `D(t) = ω cos ωt + iΩ₀ sin ωt`; `Ω(t) = −iḊ/D`.
    fn d(&self, t: f64) -> Complex64 {
        let (s, c) = (self.omega * t).sin_cos();
        Complex64::new(self.omega * c, 0.0) + Complex64::i() * self.width * s
    }

    /// Continuous `arg D(t)`. `D(t + π/ω) = −D(t)`, so whole half periods add π
    /// and only the remainder is unwrapped numerically.
    fn arg_d(&self, t: f64) -> f64 {
        let w = self.omega;
        let half = PI / w;
        let n = (t / half).floor();
        let r = t - n * half;
        let steps = 32;
        let mut prev = self.d(0.0);
        let mut acc = prev.arg();
        for i in 1..=steps {
            let cur = self.d(r * i as f64 / steps as f64);
            acc += (cur / prev).arg();
            prev = cur;
        }
        acc + n * PI
    }

    /// Evolves the factor for time `t` under `(P² + ω²q²)/2`; returns the
    /// factor and the change of the global phase (in units of ħ·phase).
    pub fn evolve(&self, t: f64, hbar: f64) -> (ModeGaussian, f64) {
        let w = self.omega;
        let (s, c) = (w * t).sin_cos();
        let center = self.center * c + self.momentum / w * s;
        let momentum = self.momentum * c - w * self.center * s;
        let d = self.d(t);
        let width = Complex64::new(w, 0.0) * (self.width * c + Complex64::new(0.0, w * s)) / d;
        let phase = -0.5 * hbar * (self.arg_d(t) - self.arg_d(0.0)) + 0.5 * (momentum * center - self.momentum * self.center);
        (ModeGaussian { omega: w, width, center, momentum }, phase)
    }

    /// `ln` of the unnormalized factor and its derivative.
    pub fn log_factor(&self, q: f64, hbar: f64) -> (Complex64, Complex64) {
        let u = q - self.center;
        let l = -self.width * u * u / (2.0 * hbar) + Complex64::new(0.0, self.momentum * u / hbar);
        let dl = -self.width * u / hbar + Complex64::new(0.0, self.momentum / hbar);
        (l, dl)
    }
}

/// Classical free coordinate standing in for the excluded zero mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FreeMode {
    pub position: f64,
    pub momentum: f64,
}

/// Product Gaussian wavefunctional over the lattice modes
/// `Ψ[q] = e^{iθ/ħ} Π_k (Re Ω_k/πħ)^{1/4} exp(−Ω_k(q_k − q̄_k)²/2ħ + i p̄_k(q_k − q̄_k)/ħ)`.
///
/// Mode coordinates are those of [`ModeBasis`], so the ground state has
/// `Ω_k = ω_k`. A zero-frequency mode (unpinned chain, massless field) is not
/// part of `Ψ`; it is carried as a free classical coordinate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussianWavefunctional {
    #[serde(skip)]
    model: LatticeModel,
    modes: Vec<Option<ModeGaussian>>,
    zero_mode: Option<FreeMode>,
    phase: f64,
    time: f64,
}

impl GaussianWavefunctional {
    pub fn ground(model: &LatticeModel) -> Self {
        let w = model.dispersion();
        let modes = w.iter().map(|&wk| (wk > 0.0).then(|| ModeGaussian::ground(wk))).collect::<Vec<_>>();
        let zero_mode = modes.iter().any(|m| m.is_none()).then_some(FreeMode { position: 0.0, momentum: 0.0 });
        GaussianWavefunctional { model: model.clone(), modes, zero_mode, phase: 0.0, time: 0.0 }
    }

    /// Ground state with coherent amplitudes `α_k` in the listed modes.
    pub fn coherent(model: &LatticeModel, alphas: &[(usize, Complex64)]) -> Result<Self> {
        let mut psi = Self::ground(model);
        let hbar = model.hbar();
        for &(k, a) in alphas {
            let m = psi.mode_mut(k)?;
            m.center = (2.0 * hbar / m.omega).sqrt() * a.re;
            m.momentum = (2.0 * hbar * m.omega).sqrt() * a.im;
        }
        Ok(psi)
    }

    /// Ground state with mode `k` given width `Ω ≠ ω_k` (squeezed).
    pub fn squeezed(model: &LatticeModel, k: usize, width: Complex64) -> Result<Self> {
        let mut psi = Self::ground(model);
        psi.mode_mut(k)?.width = width;
        psi.check_normalizable()?;
        Ok(psi)
    }

    /// Builds a state from explicit mode factors (`None` for the zero mode).
    pub fn from_modes(model: &LatticeModel, modes: Vec<Option<ModeGaussian>>, zero_mode: Option<FreeMode>) -> Result<Self> {
        if modes.len() != model.sites() {
            return Err(Error::Shape("one mode factor per lattice site expected".into()));
        }
        let psi = GaussianWavefunctional { model: model.clone(), modes, zero_mode, phase: 0.0, time: 0.0 };
        psi.check_normalizable()?;
        Ok(psi)
    }

    fn mode_mut(&mut self, k: usize) -> Result<&mut ModeGaussian> {
        let n = self.modes.len();
        match self.modes.get_mut(k) {
            Some(Some(m)) => Ok(m),
            Some(None) => Err(Error::ZeroMode),
            None => Err(Error::OutOfRange(format!("mode {k} of {n}"))),
        }
    }

    fn check_normalizable(&self) -> Result<()> {
        for (k, m) in self.modes.iter().enumerate() {
            if let Some(m) = m {
                if !(m.width.re > 0.0) || !m.width.re.is_finite() {
                    return Err(Error::NonNormalizable(m.width.re, k));
                }
            }
        }
        Ok(())
    }

    pub fn model(&self) -> &LatticeModel {
        &self.model
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Global phase `θ` with `Ψ ∝ e^{iθ/ħ}`.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn modes(&self) -> &[Option<ModeGaussian>] {
        &self.modes
    }

    pub fn mode(&self, k: usize) -> Option<&ModeGaussian> {
        self.modes.get(k).and_then(|m| m.as_ref())
    }

    pub fn zero_mode(&self) -> Option<FreeMode> {
        self.zero_mode
    }

    pub fn alpha(&self, k: usize) -> Option<Complex64> {
        self.mode(k).map(|m| m.alpha(self.model.hbar()))
    }

    /// `Ψ` after a further time `t` (closed form, any sign of `t`).
    pub fn evolve_gaussian(&self, t: f64) -> Result<Self> {
        let hbar = self.model.hbar();
        let mut out = self.clone();
        for m in out.modes.iter_mut().flatten() {
            let (next, dphase) = m.evolve(t, hbar);
            *m = next;
            out.phase += dphase;
        }
        if let Some(z) = out.zero_mode.as_mut() {
            z.position += z.momentum * t;
        }
        out.time += t;
        out.check_normalizable()?;
        Ok(out)
    }

    /// State at absolute time `time`.
    pub fn at_time(&self, time: f64) -> Result<Self> {
        self.evolve_gaussian(time - self.time)
    }

    /// `ln Ψ[q]` (normalized over the non-zero modes) and `∂ ln Ψ/∂q_k`
    /// (zero for the classical zero mode).
    pub fn log_amplitude(&self, q: &[f64]) -> Result<(Complex64, Vec<Complex64>)> {
        if q.len() != self.modes.len() {
            return Err(Error::Shape(format!("expected {} mode coordinates", self.modes.len())));
        }
        let hbar = self.model.hbar();
        let mut l = Complex64::new(0.0, self.phase / hbar);
        let mut grad = vec![Complex64::new(0.0, 0.0); q.len()];
        for (k, m) in self.modes.iter().enumerate() {
            if let Some(m) = m {
                let (lk, dk) = m.log_factor(q[k], hbar);
                l += lk + 0.25 * (m.width.re / (PI * hbar)).ln();
                grad[k] = dk;
            }
        }
        Ok((l, grad))
    }

    /// Mode velocities `q̇_k = ħ Im ∂_k ln Ψ`; the zero mode moves freely.
    pub fn mode_velocity(&self, q: &[f64]) -> Result<Vec<f64>> {
        let hbar = self.model.hbar();
        let (_, grad) = self.log_amplitude(q)?;
        let mut v: Vec<f64> = grad.iter().map(|g| hbar * g.im).collect();
        if let Some(z) = self.zero_mode {
            for (k, m) in self.modes.iter().enumerate() {
                if m.is_none() {
                    v[k] = z.momentum;
                }
            }
        }
        Ok(v)
    }

    /// Mean and variance of each mode coordinate under `|Ψ|²` (the zero mode
    /// reports its classical position with zero variance).
    pub fn moments(&self) -> Vec<(f64, f64)> {
        let hbar = self.model.hbar();
        self.modes
            .iter()
            .map(|m| match m {
                Some(m) => (m.center, m.variance(hbar)),
                None => (self.zero_mode.map_or(0.0, |z| z.position), 0.0),
            })
            .collect()
    }

    /// One configuration drawn from `|Ψ|²` (independent normals per mode).
    pub fn sample_modes<R: rand::Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.moments()
            .into_iter()
            .map(|(mean, var)| {
                let z: f64 = StandardNormal.sample(rng);
                mean + var.sqrt() * z
            })
            .collect()
    }

    /// Expected site configuration `⟨φ_x⟩`.
    pub fn mean_field(&self) -> Result<Vec<f64>> {
        let means: Vec<f64> = self.moments().into_iter().map(|(m, _)| m).collect();
        ModeBasis::new(&self.model).to_sites(&means)
    }
}
