//! Local cubic (4-point Lagrange) interpolation on uniform grids.

use super::grid::{Boundary, SpatialGrid};

/// Stencil along one axis: four node indices (`None` outside a hard wall)
/// and their Lagrange weights.
#[derive(Clone, Copy, Debug)]
pub struct Stencil {
    pub nodes: [Option<usize>; 4],
    pub weights: [f64; 4],
}

pub fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

pub fn stencil(grid: &SpatialGrid, x: f64) -> Stencil {
    let s = (x - grid.origin()) / grid.spacing();
    let base = s.floor();
    let t = s - base;
    let base = base as i64;
    let n = grid.points() as i64;
    let mut nodes = [None; 4];
    for (o, node) in nodes.iter_mut().enumerate() {
        let j = base - 1 + o as i64;
        *node = match grid.boundary() {
            Boundary::Periodic => Some(j.rem_euclid(n) as usize),
            Boundary::HardWall => (0..n).contains(&j).then_some(j as usize),
        };
    }
    Stencil { nodes, weights: cubic_weights(t) }
}
