use std::f64::consts::PI;

use bohmlab::gauge::*;
use bohmlab::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_abs(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Sum of a few low Fourier modes with random amplitudes and phases.
fn smooth(grid: GaugeGrid, rng: &mut ChaCha8Rng) -> ScalarField {
    let len = grid.points() as f64 * grid.spacing();
    let terms: Vec<([f64; 3], f64, f64)> = (0..6)
        .map(|_| {
            let k = [0, 1, 2].map(|_| 2.0 * PI * rng.random_range(-2i32..=2) as f64 / len);
            (k, rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI))
        })
        .collect();
    (0..grid.len())
        .map(|p| {
            let x = grid.position(p);
            terms.iter().map(|(k, amp, ph)| amp * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + ph).cos()).sum()
        })
        .collect()
}

fn smooth_vector(grid: GaugeGrid, rng: &mut ChaCha8Rng) -> VectorField {
    [smooth(grid, rng), smooth(grid, rng), smooth(grid, rng)]
}

/// Free-space potential by brute force, written independently of the library.
fn direct_potential(grid: GaugeGrid, charges: &[([usize; 3], f64)], at: [usize; 3]) -> f64 {
    let h = grid.spacing();
    let self_term = (3.0 * (2.0 + 3f64.sqrt()).ln() - PI / 2.0) / h;
    charges
        .iter()
        .map(|(s, q)| {
            let r = h * (0..3).map(|a| (s[a] as f64 - at[a] as f64).powi(2)).sum::<f64>().sqrt();
            let inv = if r == 0.0 { self_term } else { 1.0 / r };
            q * h.powi(3) * inv / (4.0 * PI)
        })
        .sum()
}

fn point_charges(grid: GaugeGrid, charges: &[([usize; 3], f64)]) -> ScalarField {
    let mut rho = grid.zeros();
    for (s, q) in charges {
        rho[grid.index(*s)] += q;
    }
    rho
}

#[test]
fn self_term_constant_matches_closed_form() {
    assert!((UNIT_CUBE_INVERSE_DISTANCE - (3.0 * (2.0 + 3f64.sqrt()).ln() - PI / 2.0)).abs() < 1e-14);
}

#[test]
fn transverse_field_is_unchanged_and_gradients_are_removed() {
    let g = GaugeGrid::new(16, 0.5).unwrap();
    let s = Spectral::new(g);
    let k = 2.0 * PI / 8.0;
    // Each component depends only on another coordinate: divergence-free.
    let a: VectorField = [
        (0..g.len()).map(|p| (k * g.position(p)[1]).sin()).collect(),
        (0..g.len()).map(|p| (2.0 * k * g.position(p)[2]).cos()).collect(),
        (0..g.len()).map(|p| (k * g.position(p)[0] + 0.4).sin()).collect(),
    ];
    let at = coulomb_project(&s, &a).unwrap();
    for c in 0..3 {
        assert!(a[c].iter().zip(&at[c]).all(|(x, y)| (x - y).abs() < 1e-12));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let lambda = smooth(g, &mut rng);
    let pure = s.gradient(&lambda);
    let removed = coulomb_project(&s, &pure).unwrap();
    assert!(removed.iter().all(|c| max_abs(c) < 1e-10));
}

#[test]
fn projection_is_idempotent_and_leaves_a_gradient() {
    let g = GaugeGrid::new(12, 1.0).unwrap();
    let s = Spectral::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a: VectorField = std::array::from_fn(|_| (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect());
    let once = coulomb_project(&s, &a).unwrap();
    let twice = coulomb_project(&s, &once).unwrap();
    for c in 0..3 {
        assert!(once[c].iter().zip(&twice[c]).all(|(x, y)| (x - y).abs() < 1e-12));
    }
    assert!(max_abs(&s.divergence(&once)) < 1e-10);
    let diff: VectorField = std::array::from_fn(|c| a[c].iter().zip(&once[c]).map(|(x, y)| x - y).collect());
    assert!(s.curl(&diff).iter().all(|c| max_abs(c) < 1e-10));
}

#[test]
fn dipole_potential_matches_kernel_sum() {
    let g = GaugeGrid::new(16, 1.0).unwrap();
    let s = Spectral::new(g);
    let charges = [([6, 8, 8], 1.0), ([10, 8, 8], -1.0)];
    let phi = solve_scalar_potential(&s, &point_charges(g, &charges), PoissonMode::Isolated).unwrap();
    for at in [[0, 0, 0], [8, 8, 8], [6, 8, 8], [3, 12, 5], [15, 15, 15], [9, 2, 14]] {
        let want = direct_potential(g, &charges, at);
        assert!((phi[g.index(at)] - want).abs() < 1e-8, "{at:?}: {} vs {want}", phi[g.index(at)]);
    }
}

#[test]
fn point_charge_follows_coulomb_law() {
    let g = GaugeGrid::new(24, 0.5).unwrap();
    let s = Spectral::new(g);
    let c = [12, 12, 12];
    let q = 2.0;
    let phi = solve_scalar_potential(&s, &point_charges(g, &[(c, q)]), PoissonMode::Isolated).unwrap();
    let qtot = q * g.cell_volume();
    for p in 0..g.len() {
        let site = g.site(p);
        let r = g.spacing() * (0..3).map(|a| (site[a] as f64 - c[a] as f64).powi(2)).sum::<f64>().sqrt();
        if r >= 4.0 * g.spacing() {
            let coulomb = qtot / (4.0 * PI * r);
            assert!((phi[p] / coulomb - 1.0).abs() < 0.01);
        }
    }
}

#[test]
fn periodic_poisson_residual_is_small() {
    let g = GaugeGrid::new(16, 0.4).unwrap();
    let s = Spectral::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut rho: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = rho.iter().sum::<f64>() / g.len() as f64;
    rho.iter_mut().for_each(|x| *x -= mean);
    let phi = solve_scalar_potential(&s, &rho, PoissonMode::Periodic).unwrap();
    assert!(poisson_residual(&s, &phi, &rho) < 1e-8);
    rho[0] += 1.0;
    assert!(matches!(solve_scalar_potential(&s, &rho, PoissonMode::Periodic), Err(Error::NonNeutral { .. })));
}

fn random_series(g: GaugeGrid, rng: &mut ChaCha8Rng, snapshots: usize) -> GaugeSeries {
    let a = (0..snapshots).map(|_| smooth_vector(g, rng)).collect();
    let phi = (1..snapshots).map(|_| smooth(g, rng)).collect();
    let rho = (1..snapshots).map(|_| g.zeros()).collect();
    GaugeSeries::new(g, 0.0, 0.05, a, phi, rho).unwrap()
}

#[test]
fn constant_gauge_function_changes_nothing() {
    let g = GaugeGrid::new(8, 1.0).unwrap();
    let s = Spectral::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let series = random_series(g, &mut rng, 2);
    let c = vec![vec![1.7; g.len()]; 2];
    let out = gauge_transform(&s, &series, &c).unwrap();
    for (x, y) in out.a.iter().flatten().flatten().zip(series.a.iter().flatten().flatten()) {
        assert!((x - y).abs() < 1e-12);
    }
    assert_eq!(out.phi, series.phi);
}

#[test]
fn static_gauge_function_keeps_fields() {
    let g = GaugeGrid::new(12, 0.5).unwrap();
    let s = Spectral::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let series = random_series(g, &mut rng, 3);
    let lambda = smooth(g, &mut rng);
    let out = gauge_transform(&s, &series, &vec![lambda; 3]).unwrap();
    let moved = out.a[0][0].iter().zip(&series.a[0][0]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(moved > 1e-3);
    let (f0, f1) = (field_strength(&s, &series).unwrap(), field_strength(&s, &out).unwrap());
    assert_eq!(f0.len(), 2);
    for (a, b) in f0.iter().zip(&f1) {
        assert!(a.max_difference(b) < 1e-10);
    }
}

#[test]
fn composition_of_gauge_functions() {
    let g = GaugeGrid::new(8, 0.7).unwrap();
    let s = Spectral::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let series = random_series(g, &mut rng, 3);
    let l1: Vec<ScalarField> = (0..3).map(|_| smooth(g, &mut rng)).collect();
    let l2: Vec<ScalarField> = (0..3).map(|_| smooth(g, &mut rng)).collect();
    let sum: Vec<ScalarField> = l1.iter().zip(&l2).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect();
    let seq = gauge_transform(&s, &gauge_transform(&s, &series, &l1).unwrap(), &l2).unwrap();
    let once = gauge_transform(&s, &series, &sum).unwrap();
    for (x, y) in seq.a.iter().flatten().flatten().zip(once.a.iter().flatten().flatten()) {
        assert!((x - y).abs() < 1e-12);
    }
    for (x, y) in seq.phi.iter().flatten().zip(once.phi.iter().flatten()) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn single_snapshot_is_rejected() {
    let g = GaugeGrid::new(8, 1.0).unwrap();
    let s = Spectral::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let series = random_series(g, &mut rng, 2);
    assert!(matches!(gauge_transform(&s, &series, &[g.zeros()]), Err(Error::NeedsHistory(1))));
    assert!(matches!(
        GaugeSeries::new(g, 0.0, 0.1, vec![g.zero_vector()], vec![], vec![]),
        Err(Error::NeedsHistory(1))
    ));
}

#[test]
fn pure_gauge_configuration_has_no_field() {
    let g = GaugeGrid::new(12, 0.5).unwrap();
    let s = Spectral::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let vac = GaugeSeries::new(g, 0.0, 0.1, vec![g.zero_vector(); 4], vec![g.zeros(); 3], vec![g.zeros(); 3]).unwrap();
    let lambda: Vec<ScalarField> = (0..4).map(|_| smooth(g, &mut rng)).collect();
    let pure = gauge_transform(&s, &vac, &lambda).unwrap();
    assert!(max_abs(&pure.phi[1]) > 1.0);
    for f in field_strength(&s, &pure).unwrap() {
        assert!(f.max_component() < 1e-9);
    }
}

#[test]
fn static_point_charge_field_is_radial() {
    let g = GaugeGrid::new(16, 1.0).unwrap();
    let s = Spectral::new(g);
    let c = [8, 8, 8];
    // Gaussian blob plus uniform neutralizing background; a single-site
    // charge has a cusp that the spectral gradient rings on.
    let mut rho: ScalarField = (0..g.len())
        .map(|p| {
            let site = g.site(p);
            let r2: f64 = (0..3).map(|a| (site[a] as f64 - c[a] as f64).powi(2)).sum();
            (-r2 / (2.0 * 1.5f64.powi(2))).exp()
        })
        .collect();
    let mean = rho.iter().sum::<f64>() / g.len() as f64;
    rho.iter_mut().for_each(|x| *x -= mean);
    let cfg = GaugeConfiguration::coulomb(&s, rho, &g.zero_vector(), PoissonMode::Periodic).unwrap();
    let f = &field_strength(&s, &GaugeSeries::from_static(&cfg, 0.1).unwrap()).unwrap()[0];
    assert!(f.b.iter().all(|b| max_abs(b) == 0.0));
    for axis in 0..3 {
        for off in [-3i32, -2, -1, 1, 2, 3] {
            let mut site = c;
            site[axis] = (c[axis] as i32 + off) as usize;
            let p = g.index(site);
            assert!(f.e[axis][p] * off as f64 > 0.0, "axis {axis} offset {off}");
            for other in (0..3).filter(|&o| o != axis) {
                assert!(f.e[other][p].abs() < 1e-12);
            }
        }
    }
}

#[test]
fn magnetic_field_is_divergence_free() {
    let g = GaugeGrid::new(16, 0.3).unwrap();
    let s = Spectral::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let a: VectorField = std::array::from_fn(|_| (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect());
    let series = GaugeSeries::new(g, 0.0, 0.1, vec![a.clone(), a], vec![g.zeros()], vec![g.zeros()]).unwrap();
    for f in field_strength(&s, &series).unwrap() {
        assert!(f.max_div_b(&s) < 1e-10);
    }
}

#[test]
fn potential_responds_in_the_same_snapshot() {
    let g = GaugeGrid::new(16, 1.0).unwrap();
    let before = point_charges(g, &[([8, 8, 8], 1.0)]);
    let after = point_charges(g, &[([8, 8, 8], 1.0), ([9, 8, 8], -2.5)]);
    let series = vec![before.clone(), before.clone(), after.clone(), after];
    let probe = [0, 0, 0];
    let rep = instantaneity_demo(g, &series, 0.25, probe).unwrap();
    assert_eq!(rep.source_change_time, Some(0.5));
    assert_eq!(rep.response_time, Some(0.5));
    assert!(rep.simultaneous);
    assert!(rep.delta_phi.abs() > 0.0);
    let want = direct_potential(g, &[([9, 8, 8], -2.5)], probe);
    assert!((rep.delta_phi - want).abs() < 1e-8);
    assert!(rep.prediction_error < 1e-8);

    let flat = instantaneity_demo(g, &[before.clone(), before], 0.25, probe).unwrap();
    assert_eq!(flat.delta_phi, 0.0);
}

#[test]
fn configuration_csv_round_trip() {
    let g = GaugeGrid::new(4, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let cfg = GaugeConfiguration::new(g, smooth(g, &mut rng), smooth_vector(g, &mut rng), smooth(g, &mut rng)).unwrap();
    let mut buf = Vec::new();
    cfg.write_csv(&mut buf).unwrap();
    let back = GaugeConfiguration::read_csv(g, buf.as_slice()).unwrap();
    assert_eq!(back, cfg);
    let truncated: String = String::from_utf8(buf).unwrap().lines().take(10).collect::<Vec<_>>().join("\n");
    assert!(GaugeConfiguration::read_csv(g, truncated.as_bytes()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_gauge_transforms_keep_field_strength(seed in any::<u64>()) {
        let g = GaugeGrid::new(8, 0.6).unwrap();
        let s = Spectral::new(g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let series = random_series(g, &mut rng, 2);
        let lambda = vec![smooth(g, &mut rng), smooth(g, &mut rng)];
        let out = gauge_transform(&s, &series, &lambda).unwrap();
        let (a, b) = (&field_strength(&s, &series).unwrap()[0], &field_strength(&s, &out).unwrap()[0]);
        prop_assert!(a.max_difference(b) < 1e-9);
    }
}
