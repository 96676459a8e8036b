//! Coulomb-gauge electromagnetism on a small periodic 3D grid: transverse
//! projection, the instantaneous scalar potential, and invariance of `E` and
//! `B` under gauge transformations.

mod config;
mod grid;
mod instantaneity;
mod invariance;
mod potential;

pub use config::{field_strength, gauge_transform, FieldStrength, GaugeConfiguration, GaugeSeries};
pub use grid::{GaugeGrid, ScalarField, Spectral, VectorField, GAUGE_POINT_CAP};
pub use instantaneity::{instantaneity_demo, InstantaneityReport};
pub use invariance::{gauge_invariance_check, random_smooth_field, GaugeInvarianceOptions, GaugeInvarianceReport};
pub use potential::{
    coulomb_kernel, coulomb_kernel_sum, coulomb_project, poisson_residual, solve_scalar_potential, PoissonMode,
    NEUTRALITY_TOLERANCE, UNIT_CUBE_INVERSE_DISTANCE,
};
