//! Numerical laboratory for pilot-wave (Bohmian) dynamics of particles and
//! lattice fields, Coulomb-gauge electromagnetism with ontic potentials, and
//! phonon models with an emergent sound-cone Lorentz symmetry.
//!
//! Module map:
//!
//! * [`qm`] grids, wavefunctions, split-step evolution and brute-force eigensolvers
//! * [`bohm`] particle guidance, Born sampling, equivariance, pointer and two-slit experiments
//! * [`lattice`] harmonic chain / lattice scalar field, Fock spectrum, Gaussian wavefunctionals
//! * [`field`] Bohmian field trajectories in mode space
//! * [`gauge`] Coulomb projection, instantaneous scalar potential, gauge invariance of E and B
//! * [`relativity`] sound-cone boosts, correlator invariance, frame reports
//! * [`runner`] named experiments with deterministic artifacts

pub mod bohm;
pub mod error;
pub mod field;
pub mod gauge;
pub mod lattice;
pub mod linalg;
pub mod qm;
pub mod relativity;
pub mod runner;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
