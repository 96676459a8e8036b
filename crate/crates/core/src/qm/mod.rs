//! Grids, wavefunctions, Schrödinger evolution and brute-force eigensolvers.

mod eigen;
mod evolve;
pub mod fft;
mod grid;
mod hamiltonian;
pub mod interp;
mod ops;
mod wavefunction;

pub use eigen::{brute_force_eigens, brute_force_eigens_with};
pub use evolve::{evolve, evolve_eigenbasis, evolve_split_step, EigenbasisPropagator, Propagator, SplitStepPropagator};
pub use grid::{Boundary, GridConfig, SpatialGrid, DEFAULT_POINT_CAP, MIN_EVOLUTION_POINTS};
pub use hamiltonian::{HamiltonianConfig, HamiltonianSpec, MomentumCoupling, PotentialSpec, SystemConfig};
pub use ops::{derivative_matrix, energy, gradient, kinetic_matrix, HamiltonianOperator};
pub use wavefunction::WaveFunction;
