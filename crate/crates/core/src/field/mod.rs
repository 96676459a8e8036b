//! Bohmian field ontology on the lattice: the guidance law for field
//! configurations, non-Gaussian (Fock) wavefunctionals, field-level
//! equivariance and guidance with traced internal components.

mod equivariance;
mod grid;
mod guidance;
mod integrate;
mod traced;
mod wavefunctional;

pub use equivariance::{field_equivariance, FieldEquivarianceOptions, FieldEquivarianceReport, InitialEnsemble, ModeMoments};
pub use grid::{gridded_wavefunctional, site_hamiltonian};
pub use guidance::{field_guidance_velocity, FieldConfiguration, GuidanceLaw, FIELD_NODE_THRESHOLD};
pub use integrate::{integrate_field_trajectory, FieldTrajectory};
pub use traced::{traced_nonontic_demo, TracedWavefunctional};
pub use wavefunctional::{hermite_normalized, FockSuperposition, ScaledAmplitude, Wavefunctional};
