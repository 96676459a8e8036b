use std::f64::consts::PI;

use bohmlab::field::GuidanceLaw;
use bohmlab::lattice::{Event, GaussianWavefunctional, LatticeModel};
use bohmlab::relativity::*;
use bohmlab::{Complex64, Error};
use proptest::prelude::*;

fn reference_field(sites: usize) -> LatticeModel {
    LatticeModel::scalar_field(sites, 256.0 / sites as f64, 0.02).unwrap()
}

proptest! {
    #[test]
    fn boost_composition_is_velocity_addition(u in -0.9f64..0.9, w in -0.9f64..0.9, z in -0.9f64..0.9, x in -50.0f64..50.0, t in -50.0f64..50.0) {
        let c = 1.7;
        let (a, b, d) = (SoundBoost::new(u * c, c).unwrap(), SoundBoost::new(w * c, c).unwrap(), SoundBoost::new(z * c, c).unwrap());
        let ab = a.compose(&b).unwrap();
        prop_assert!((ab.velocity() - (u + w) * c / (1.0 + u * w)).abs() < 1e-12);
        let e = Event::new(x, t);
        let (seq, once) = (b.apply(a.apply(e)), ab.apply(e));
        prop_assert!((seq.x - once.x).abs() < 1e-9 && (seq.t - once.t).abs() < 1e-9);
        let left = ab.compose(&d).unwrap();
        let right = a.compose(&b.compose(&d).unwrap()).unwrap();
        prop_assert!((left.velocity() - right.velocity()).abs() < 1e-12);
    }
}

#[test]
fn dispersion_is_linear_at_long_wavelength() {
    let chain = LatticeModel::atom_chain(256, 1.0, 1.0, 1.0).unwrap();
    let scan = dispersion_linearity_scan(&chain, 0.2).unwrap();
    assert!(scan.max_deviation < 0.01);
    // sin(x)/x at x = ka/2 = 0.1 is the largest deviation below the cut.
    let k = scan.profile.iter().filter(|p| p.k <= 0.2).map(|p| p.k).fold(0.0, f64::max);
    assert!((scan.max_deviation - (1.0 - (0.5 * k).sin() / (0.5 * k))).abs() < 1e-12);
    assert!(scan.monotone);
    let edge = dispersion_linearity_scan(&chain, PI).unwrap();
    assert!((edge.max_deviation - (1.0 - 2.0 / PI)).abs() < 1e-12);
}

#[test]
fn refining_the_lattice_improves_linearity_at_fixed_k() {
    let mut last = f64::INFINITY;
    for n in [32, 64, 128, 256] {
        let m = LatticeModel::scalar_field(n, 64.0 / n as f64, 0.0).unwrap();
        let scan = dispersion_linearity_scan(&m, PI / m.spacing()).unwrap();
        // j = 5 is the same physical wavenumber at every refinement.
        let d = scan.profile[4].deviation;
        assert!((scan.profile[4].k - 2.0 * PI * 5.0 / 64.0).abs() < 1e-12);
        assert!(d < last);
        last = d;
    }
}

#[test]
fn linearity_scan_rejects_gapped_models() {
    let m = LatticeModel::scalar_field(16, 1.0, 0.5).unwrap();
    assert!(dispersion_linearity_scan(&m, 0.2).is_err());
}

#[test]
fn identity_boost_has_zero_deviation() {
    let m = reference_field(256);
    let r = boost_invariance_correlator(&m, &[EventPair::equal_time(10.0, 32.0)], &SoundBoost::identity(1.0).unwrap()).unwrap();
    assert_eq!(r.max_relative_deviation, 0.0);
}

#[test]
fn boosted_correlator_matches_and_converges() {
    let pairs = [EventPair::equal_time(0.0, 32.0)];
    let b = SoundBoost::new(0.3, 1.0).unwrap();
    let coarse = boost_invariance_correlator(&reference_field(256), &pairs, &b).unwrap();
    assert!(coarse.max_relative_deviation < 0.05, "{}", coarse.max_relative_deviation);
    let steps = correlator_refinement(&reference_field(256), &pairs, &b, &[256, 512]).unwrap();
    assert!(strictly_decreasing(&steps));
    assert_eq!(steps[0].max_relative_deviation, coarse.max_relative_deviation);

    // Independent mode sum on the boosted events.
    let row = &coarse.pairs[0];
    let g = 1.0 / (1.0 - 0.09f64).sqrt();
    assert!((row.boosted.second.x - row.boosted.first.x - g * 32.0).abs() < 1e-12);
    let (dx, dt) = (row.boosted.first.x - row.boosted.second.x, row.boosted.first.t - row.boosted.second.t);
    let mut w = Complex64::new(0.0, 0.0);
    for j in 0..256i64 {
        let k = 2.0 * PI * (if j <= 128 { j } else { j - 256 }) as f64 / 256.0;
        let om = (0.02f64.powi(2) + 4.0 * (0.5 * k).sin().powi(2)).sqrt();
        let space = if j == 128 { Complex64::new((k * dx).cos(), 0.0) } else { Complex64::from_polar(1.0, k * dx) };
        w += space * Complex64::from_polar(1.0, -om * dt) / (2.0 * 256.0 * om);
    }
    assert!((w - row.w_boosted).norm() < 1e-12 * w.norm());
}

#[test]
fn correlator_enforces_validity_window() {
    let m = reference_field(256);
    let b = SoundBoost::new(0.3, 1.0).unwrap();
    for pair in [EventPair::equal_time(0.0, 4.0), EventPair::equal_time(0.0, 100.0)] {
        assert!(matches!(boost_invariance_correlator(&m, &[pair], &b), Err(Error::OutOfRange(_))));
    }
    let fast = SoundBoost::new(0.7, 1.0).unwrap();
    assert!(matches!(
        boost_invariance_correlator(&m, &[EventPair::equal_time(0.0, 32.0)], &fast),
        Err(Error::OutOfRange(_))
    ));
}

#[test]
fn frame_report_passes_by_default() {
    let r = frame_prediction_report(&FrameReportConfig::default()).unwrap();
    assert!(r.passed, "{:?}", r.culprits);
    assert!(r.correlator.max_relative_deviation < CORRELATOR_TOLERANCE);
    assert_eq!(r.thresholds.len(), 3);
}

#[test]
fn sabotaged_guidance_is_named_as_culprit() {
    let r = frame_prediction_report(&FrameReportConfig { law: GuidanceLaw::SignFlipped, ..Default::default() }).unwrap();
    assert!(!r.passed);
    assert_eq!(r.culprits, vec!["field-equivariance".to_string()]);
    assert!(r.correlator_passed);
}

#[test]
fn zero_velocity_frame_report() {
    let r = frame_prediction_report(&FrameReportConfig { beta: 0.0, ..Default::default() }).unwrap();
    assert!(r.passed);
    assert_eq!(r.correlator.max_relative_deviation, 0.0);
}

fn packet_model() -> LatticeModel {
    LatticeModel::scalar_field(128, 1.0, 0.1).unwrap()
}

#[test]
fn trajectories_are_frame_dependent_but_predictions_are_not() {
    let m = packet_model();
    let psi = wave_packet_state(&m, 1.0, 8.0, 0.25, 64.0).unwrap();
    let r = trajectory_noncovariance_demo(&psi, &SoundBoost::new(0.3, 1.0).unwrap(), &NoncovarianceOptions::default()).unwrap();
    assert!(!r.degenerate);
    assert!(r.trajectory_mismatch > 0.0);
    assert!(r.trajectory_mismatch > 10.0 * r.prediction_mismatch, "{r:?}");
}

#[test]
fn identity_boost_reproduces_the_history() {
    let m = packet_model();
    let psi = wave_packet_state(&m, 1.0, 8.0, 0.25, 64.0).unwrap();
    let opts = NoncovarianceOptions { duration: 4.0, slices: 4, ..Default::default() };
    let r = trajectory_noncovariance_demo(&psi, &SoundBoost::identity(1.0).unwrap(), &opts).unwrap();
    assert!(r.trajectory_mismatch < 1e-12 && r.prediction_mismatch < 1e-12, "{r:?}");
}

#[test]
fn ground_state_demo_is_degenerate() {
    let m = packet_model();
    let r = trajectory_noncovariance_demo(
        &GaussianWavefunctional::ground(&m),
        &SoundBoost::new(0.3, 1.0).unwrap(),
        &NoncovarianceOptions { duration: 2.0, slices: 2, ..Default::default() },
    )
    .unwrap();
    assert!(r.degenerate);
    assert_eq!(r.trajectory_mismatch, 0.0);
    assert_eq!(r.warnings.len(), 1);
}

#[test]
fn squeezed_states_are_not_supported() {
    let m = LatticeModel::scalar_field(16, 1.0, 0.5).unwrap();
    let psi = GaussianWavefunctional::squeezed(&m, 1, Complex64::new(2.0, 0.0)).unwrap();
    let r = trajectory_noncovariance_demo(&psi, &SoundBoost::new(0.3, 1.0).unwrap(), &NoncovarianceOptions { origin: 8.0, window: 4.0, ..Default::default() });
    assert!(matches!(r, Err(Error::Unsupported(_))));
}
