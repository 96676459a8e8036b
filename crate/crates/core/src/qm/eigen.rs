use num_complex::Complex64;

use super::grid::SpatialGrid;
use super::hamiltonian::HamiltonianSpec;
use super::ops::HamiltonianOperator;
use super::wavefunction::WaveFunction;
use crate::linalg::{lowest_eigenpairs, EigenOptions};
use crate::Result;

/// The `k` lowest eigenpairs of `h` on `grid`, energies ascending,
/// eigenfunctions normalized with grid quadrature.
pub fn brute_force_eigens(
    grid: &SpatialGrid,
    h: &HamiltonianSpec,
    k: usize,
) -> Result<Vec<(f64, WaveFunction)>> {
    brute_force_eigens_with(grid, h, k, &EigenOptions::default())
}

pub fn brute_force_eigens_with(
    grid: &SpatialGrid,
    h: &HamiltonianSpec,
    k: usize,
    opts: &EigenOptions,
) -> Result<Vec<(f64, WaveFunction)>> {
    let components = h.components();
    let op = HamiltonianOperator::new(grid, h, components)?;
    let scale = 1.0 / grid.cell_volume().sqrt();
    let pairs: Vec<(f64, Vec<Complex64>)> = if op.is_real() {
        let p = lowest_eigenpairs::<f64, _>(&op, k, opts)?;
        p.values
            .into_iter()
            .zip(p.vectors)
            .map(|(e, v)| (e, v.into_iter().map(|x| Complex64::new(x * scale, 0.0)).collect()))
            .collect()
    } else {
        let p = lowest_eigenpairs::<Complex64, _>(&op, k, opts)?;
        p.values
            .into_iter()
            .zip(p.vectors)
            .map(|(e, v)| (e, v.into_iter().map(|x| x * scale).collect()))
            .collect()
    };
    pairs
        .into_iter()
        .map(|(e, amps)| Ok((e, WaveFunction::new(grid.clone(), components, amps, 0.0)?)))
        .collect()
}
