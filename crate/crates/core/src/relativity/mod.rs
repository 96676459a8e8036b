//! Sound-cone Lorentz symmetry of lattice phonons: dispersion linearity,
//! boost invariance of vacuum correlators, composite frame reports, and
//! the frame dependence of Bohmian field histories.

mod boost;
mod correlator;
mod dispersion;
mod noncovariance;
mod report;

pub use boost::SoundBoost;
pub use correlator::{
    boost_invariance_correlator, correlator_refinement, strictly_decreasing, BoostReport, EventPair, PairComparison,
    RefinementStep, MAX_BOOST_BETA, MAX_SEPARATION_FRACTION, MIN_SEPARATION_SPACINGS,
};
pub use dispersion::{dispersion_linearity_scan, DispersionPoint, DispersionScan};
pub use noncovariance::{
    coherent_from_mean_field, trajectory_noncovariance_demo, wave_packet_state, InitialConfiguration, NoncovarianceOptions,
    NoncovarianceReport, SliceMismatch,
};
pub use report::{frame_prediction_report, FrameReport, FrameReportConfig, Threshold, CORRELATOR_TOLERANCE, PREDICTION_OPERATIONALIZATION};
