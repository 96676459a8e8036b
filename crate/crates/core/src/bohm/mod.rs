//! Bohmian particle mechanics: guidance, Born sampling, trajectory
//! integration and the measurement experiments built on them.

mod ensemble;
mod equivariance;
mod guidance;
mod integrate;
mod nonlocality;
mod pointer;
mod two_slit;

pub use ensemble::{sample_born, TrajectoryEnsemble};
pub(crate) use ensemble::member_rng;
pub(crate) use integrate::stale_check;
pub use equivariance::{equivariance_statistic, EquivarianceOptions, EquivarianceStats, GridMarginal};
pub use guidance::{guidance_velocity, GuidanceField, LocalAmplitude, DEFAULT_NODE_THRESHOLD};
pub use integrate::{
    integrate_trajectories, IntegrationOptions, TrajectoryIntegrator, TrajectoryRun, UNRESOLVED_WARNING_FRACTION,
};
pub use nonlocality::{entangled_test_state, nonlocality_probe};
pub use pointer::{pointer_measurement, PointerConfig, PointerResult};
pub use two_slit::{fringe_minima, two_slit_experiment, FringeMinimum, TwoSlitConfig, TwoSlitResult};
