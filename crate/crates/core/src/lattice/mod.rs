//! Lattice-regularized free bosonic fields: harmonic chains and scalar
//! fields, their normal modes, phonon spectra, Gaussian wavefunctionals and
//! vacuum correlators.

mod correlator;
mod fock;
mod gaussian;
mod model;
mod modes;

pub use correlator::{two_point_function, Event};
pub use fock::{brute_force_field_eigens, fock_energy, fock_levels, FieldGridHamiltonian, FockState, SiteGrid};
pub use gaussian::{FreeMode, GaussianWavefunctional, ModeGaussian};
pub use model::{LatticeKind, LatticeModel};
pub use modes::ModeBasis;
