use num_complex::Complex64;

use super::guidance::GuidanceField;
use crate::qm::{HamiltonianSpec, SpatialGrid, WaveFunction};
use crate::{Error, Result};

/// `|v₁(x1; x2 + δ) − v₁(x1; x2)| / δ` for a two-particle wavefunction whose
/// grid axes are the particle coordinates.
pub fn nonlocality_probe(psi: &WaveFunction, h: &HamiltonianSpec, x1: f64, x2: f64, delta: f64) -> Result<f64> {
    if psi.grid().dim() != 2 {
        return Err(Error::Shape("nonlocality probe needs a two-particle (2D) wavefunction".into()));
    }
    if !(delta != 0.0 && delta.is_finite()) {
        return Err(Error::invalid("delta must be finite and nonzero"));
    }
    let f = GuidanceField::new(psi, h)?;
    let a = f.velocity(&[x1, x2])?[0];
    let b = f.velocity(&[x1, x2 + delta])?[0];
    Ok((b - a).abs() / delta.abs())
}

/// Standard entangled test state: particle 2 sits at `±d` correlated with
/// particle 1 moving with momentum `±k`,
/// `ψ ∝ φ(x1) [φ(x2 − d) e^{ikx1} + φ(x2 + d) e^{−ikx1}]` with unit-width Gaussians.
pub fn entangled_test_state(grid: &SpatialGrid, d: f64, k: f64) -> Result<WaveFunction> {
    let g = |u: f64| (-u * u / 4.0).exp();
    WaveFunction::from_fn(grid.clone(), |x1, x2| {
        let a = Complex64::new(0.0, k * x1).exp() * g(x2 - d);
        let b = Complex64::new(0.0, -k * x1).exp() * g(x2 + d);
        (a + b) * g(x1)
    })?
    .normalized()
}
