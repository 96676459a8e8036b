use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::SpatialGrid;
use crate::{Error, Result};

/// `H = Σ_a p_a²/2m_a + V(x) + C ⊗ 1 + g x_s p_t`.
///
/// `C` is an optional `s × s` Hermitian matrix acting on the internal
/// components (row-major), and the last term is an optional von Neumann
/// coupling between two grid axes.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub masses: Vec<f64>,
    pub potential: Vec<f64>,
    pub internal_coupling: Option<Vec<Complex64>>,
    pub momentum_coupling: Option<MomentumCoupling>,
    pub hbar: f64,
}

/// `g · x_source · p_target`; drives the target coordinate with velocity `g x_source`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentumCoupling {
    pub source_axis: usize,
    pub target_axis: usize,
    pub strength: f64,
}

impl HamiltonianSpec {
    pub fn new(masses: Vec<f64>, potential: Vec<f64>) -> Self {
        HamiltonianSpec {
            masses,
            potential,
            internal_coupling: None,
            momentum_coupling: None,
            hbar: 1.0,
        }
    }

    pub fn free(grid: &SpatialGrid, mass: f64) -> Self {
        HamiltonianSpec::new(vec![mass; grid.dim()], vec![0.0; grid.total_points()])
    }

    /// Isotropic harmonic well `½ m ω² |x - center|²` with the same mass on every axis.
    pub fn harmonic(grid: &SpatialGrid, mass: f64, omega: f64) -> Self {
        let potential = (0..grid.total_points())
            .map(|p| {
                let [x, y] = grid.point(p);
                0.5 * mass * omega * omega * (x * x + if grid.dim() == 2 { y * y } else { 0.0 })
            })
            .collect();
        HamiltonianSpec::new(vec![mass; grid.dim()], potential)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn with_internal_coupling(mut self, matrix: Vec<Complex64>) -> Self {
        self.internal_coupling = Some(matrix);
        self
    }

    pub fn with_momentum_coupling(mut self, coupling: MomentumCoupling) -> Self {
        self.momentum_coupling = Some(coupling);
        self
    }

    /// Number of internal components implied by the coupling matrix (1 without one).
    pub fn components(&self) -> usize {
        self.internal_coupling
            .as_ref()
            .map(|c| (c.len() as f64).sqrt().round() as usize)
            .unwrap_or(1)
    }

    pub fn max_abs_potential(&self) -> f64 {
        self.potential.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Checks the spec against a grid and a component count.
    pub fn validate(&self, grid: &SpatialGrid, components: usize) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::invalid("hbar must be positive"));
        }
        if self.masses.len() != grid.dim() {
            return Err(Error::Shape(format!(
                "{} masses for a {}-dimensional grid",
                self.masses.len(),
                grid.dim()
            )));
        }
        if self.masses.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
            return Err(Error::invalid("masses must be positive"));
        }
        if self.potential.len() != grid.total_points() {
            return Err(Error::Shape(format!(
                "potential has {} values, grid has {} points",
                self.potential.len(),
                grid.total_points()
            )));
        }
        if self.potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("potential must be finite"));
        }
        if let Some(c) = &self.internal_coupling {
            if c.len() != components * components {
                return Err(Error::Shape(format!(
                    "internal coupling has {} entries, need {}",
                    c.len(),
                    components * components
                )));
            }
            for i in 0..components {
                for j in 0..components {
                    let (a, b) = (c[i * components + j], c[j * components + i]);
                    if (a - b.conj()).norm() > 1e-12 {
                        return Err(Error::invalid("internal coupling must be Hermitian"));
                    }
                }
            }
        }
        if let Some(mc) = &self.momentum_coupling {
            if mc.source_axis >= grid.dim()
                || mc.target_axis >= grid.dim()
                || mc.source_axis == mc.target_axis
            {
                return Err(Error::invalid("momentum coupling needs two distinct grid axes"));
            }
            if !mc.strength.is_finite() {
                return Err(Error::invalid("momentum coupling strength must be finite"));
            }
        }
        Ok(())
    }
}

/// JSON form of a potential.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Free,
    /// `Σ_a ½ m_a ω_a² (x_a - c_a)²`
    Harmonic {
        omega: Vec<f64>,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// Explicit values in flat grid order.
    Values { values: Vec<f64> },
}

/// JSON form of a [`HamiltonianSpec`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub masses: Vec<f64>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    pub potential: PotentialSpec,
    /// Rows of `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub internal_coupling: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum_coupling: Option<MomentumCoupling>,
}

fn default_hbar() -> f64 {
    1.0
}

impl HamiltonianConfig {
    pub fn build(&self, grid: &SpatialGrid) -> Result<HamiltonianSpec> {
        let potential = match &self.potential {
            PotentialSpec::Free => vec![0.0; grid.total_points()],
            PotentialSpec::Harmonic { omega, center } => {
                if omega.len() != grid.dim() || self.masses.len() != grid.dim() {
                    return Err(Error::Config("harmonic potential needs one omega and mass per axis".into()));
                }
                let center: Vec<f64> = if center.is_empty() { vec![0.0; grid.dim()] } else { center.clone() };
                if center.len() != grid.dim() {
                    return Err(Error::Config("harmonic center needs one entry per axis".into()));
                }
                (0..grid.total_points())
                    .map(|p| {
                        let x = grid.point(p);
                        (0..grid.dim())
                            .map(|a| 0.5 * self.masses[a] * omega[a].powi(2) * (x[a] - center[a]).powi(2))
                            .sum()
                    })
                    .collect()
            }
            PotentialSpec::Values { values } => values.clone(),
        };
        let mut h = HamiltonianSpec::new(self.masses.clone(), potential).with_hbar(self.hbar);
        if let Some(rows) = &self.internal_coupling {
            h.internal_coupling = Some(
                rows.iter()
                    .flat_map(|r| r.iter().map(|[re, im]| Complex64::new(*re, *im)))
                    .collect(),
            );
        }
        h.momentum_coupling = self.momentum_coupling;
        let components = self
            .internal_coupling
            .as_ref()
            .map(|r| r.len())
            .unwrap_or(1);
        h.validate(grid, components)?;
        Ok(h)
    }
}

/// A grid plus the Hamiltonian defined on it, as loaded from JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub grid: SpatialGrid,
    pub hamiltonian: HamiltonianConfig,
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<(SpatialGrid, HamiltonianSpec)> {
        let cfg: SystemConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let h = cfg.hamiltonian.build(&cfg.grid)?;
        Ok((cfg.grid, h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_harmonic_system_from_json() {
        let (grid, h) = SystemConfig::from_json(
            r#"{
              "grid": {"dim": 1, "points": 64, "spacing": 0.2, "boundary": "periodic"},
              "hamiltonian": {"masses": [1.0], "potential": {"kind": "harmonic", "omega": [2.0]}}
            }"#,
        )
        .unwrap();
        assert_eq!(h.potential.len(), 64);
        let p = grid.flatten([40, 0]);
        let x = grid.point(p)[0];
        assert!((h.potential[p] - 2.0 * x * x).abs() < 1e-12);
        assert_eq!(h.hbar, 1.0);
    }

    #[test]
    fn rejects_non_hermitian_coupling() {
        let grid = SpatialGrid::new(1, 16, 0.5, super::super::Boundary::Periodic).unwrap();
        let h = HamiltonianSpec::free(&grid, 1.0).with_internal_coupling(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        assert!(h.validate(&grid, 2).is_err());
    }

    #[test]
    fn rejects_unknown_fields() {
        let err = SystemConfig::from_json(
            r#"{"grid": {"dim": 1, "points": 64, "spacing": 0.2, "boundary": "periodic"},
                "hamiltonian": {"masses": [1.0], "potential": {"kind": "free"}, "spin": 3}}"#,
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }
}
