use serde::{Deserialize, Serialize};

use super::wavefunctional::Wavefunctional;
use crate::lattice::ModeBasis;
use crate::{Error, Result};

/// Default node threshold for mode-space guidance, relative to the
/// unit-scale polynomial part of the amplitude.
pub const FIELD_NODE_THRESHOLD: f64 = 1e-12;

/// Real field value per lattice site at one time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldConfiguration {
    pub values: Vec<f64>,
    pub time: f64,
}

impl FieldConfiguration {
    pub fn new(values: Vec<f64>, time: f64) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) || !time.is_finite() {
            return Err(Error::invalid("field values and time must be finite"));
        }
        Ok(FieldConfiguration { values, time })
    }

    pub fn zeros(sites: usize, time: f64) -> Self {
        FieldConfiguration { values: vec![0.0; sites], time }
    }
}

/// Guidance law used to move field configurations. `SignFlipped` reverses
/// the velocity and exists only as a negative control.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuidanceLaw {
    #[default]
    Standard,
    SignFlipped,
}

impl GuidanceLaw {
    pub fn sign(self) -> f64 {
        match self {
            GuidanceLaw::Standard => 1.0,
            GuidanceLaw::SignFlipped => -1.0,
        }
    }
}

/// `∂Φ_x/∂t = (ħ/μ) Im[∂Ψ/∂φ_x / Ψ]` at `φ = Φ` (`μ = a` for the scalar
/// field, i.e. `δ/δφ(x) → (1/a)∂/∂φ_x`), evaluated in mode space and mapped
/// back to sites. With mass-weighted modes `q = √μ Eᵀφ` this is
/// `Φ̇ = E q̇/√μ` with `q̇_k = ħ Im ∂_k ln Ψ`.
pub fn field_guidance_velocity(psi: &Wavefunctional, phi: &FieldConfiguration) -> Result<Vec<f64>> {
    crate::bohm::stale_check(phi.time, psi.time())?;
    let basis = ModeBasis::new(psi.model());
    let q = basis.to_modes(&phi.values)?;
    let qdot = psi.mode_velocity(&q, FIELD_NODE_THRESHOLD)?;
    basis.to_sites(&qdot)
}
