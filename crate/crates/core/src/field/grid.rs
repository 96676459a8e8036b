use num_complex::Complex64;

use super::wavefunctional::Wavefunctional;
use crate::lattice::{LatticeModel, ModeBasis};
use crate::qm::{Boundary, HamiltonianSpec, SpatialGrid, WaveFunction};
use crate::{Error, Result};

/// Site-space Hamiltonian `Σ p_x²/2μ + ½ φᵀKφ` on a 1D or 2D periodic grid
/// (one axis per lattice site).
pub fn site_hamiltonian(model: &LatticeModel, grid: &SpatialGrid) -> Result<HamiltonianSpec> {
    let n = model.sites();
    if grid.dim() != n {
        return Err(Error::Shape(format!("{n}-site model needs a {n}D grid")));
    }
    let k = model.stiffness();
    let potential = (0..grid.total_points())
        .map(|p| {
            let pt = grid.point(p);
            let phi = &pt[..n];
            0.5 * (0..n).map(|x| (0..n).map(|y| phi[x] * k[x * n + y] * phi[y]).sum::<f64>()).sum::<f64>()
        })
        .collect();
    Ok(HamiltonianSpec::new(vec![model.inertia(); n], potential).with_hbar(model.hbar()))
}

/// Tabulates a mode-space wavefunctional on a site-space grid, normalized
/// on the grid. Used to cross-check mode-space guidance against ordinary
/// grid dynamics for `N ≤ 2`.
pub fn gridded_wavefunctional(psi: &Wavefunctional, points: usize, spacing: f64) -> Result<WaveFunction> {
    let model = psi.model();
    let n = model.sites();
    if n > 2 {
        return Err(Error::Unsupported("gridded wavefunctionals are limited to N ≤ 2 sites".into()));
    }
    let grid = SpatialGrid::new(n, points, spacing, Boundary::Periodic)?;
    let basis = ModeBasis::new(model);
    let amps = (0..grid.total_points())
        .map(|p| {
            let pt = grid.point(p);
            let q = basis.to_modes(&pt[..n])?;
            let a = psi.amplitude(&q)?;
            Ok(a.value * a.log_scale.exp())
        })
        .collect::<Result<Vec<Complex64>>>()?;
    WaveFunction::new(grid, 1, amps, psi.time())?.normalized()
}
