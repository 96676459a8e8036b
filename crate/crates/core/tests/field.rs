use bohmlab::bohm::{integrate_trajectories, GuidanceField, IntegrationOptions, TrajectoryEnsemble};
use bohmlab::field::{
    field_equivariance, field_guidance_velocity, gridded_wavefunctional, integrate_field_trajectory, site_hamiltonian,
    traced_nonontic_demo, FieldConfiguration, FieldEquivarianceOptions, FockSuperposition, GuidanceLaw, InitialEnsemble,
    TracedWavefunctional, Wavefunctional,
};
use bohmlab::lattice::{FockState, GaussianWavefunctional, LatticeModel, ModeBasis};
use bohmlab::Complex64;

fn two_site() -> LatticeModel {
    LatticeModel::scalar_field(2, 1.0, 1.0).unwrap()
}

fn one_phonon(model: &LatticeModel) -> Wavefunctional {
    FockSuperposition::new(
        model,
        vec![(Complex64::new(1.0, 0.0), FockState::single(0, 1)), (Complex64::new(0.0, 1.0), FockState::single(1, 1))],
    )
    .unwrap()
    .into()
}

#[test]
fn mode_space_guidance_equals_grid_guidance_at_nodes() {
    let m = two_site();
    let (points, spacing) = (128, 0.125);
    for psi in [
        one_phonon(&m),
        GaussianWavefunctional::coherent(&m, &[(0, Complex64::new(0.5, 0.7)), (1, Complex64::new(-0.3, 0.2))])
            .unwrap()
            .evolve_gaussian(0.4)
            .unwrap()
            .into(),
        one_phonon(&m).at_time(1.7).unwrap(),
    ] {
        let grid_psi = gridded_wavefunctional(&psi, points, spacing).unwrap();
        let h = site_hamiltonian(&m, grid_psi.grid()).unwrap();
        let field = GuidanceField::new(&grid_psi, &h).unwrap();
        for (i, j) in [(56, 66), (68, 60), (76, 46), (63, 65)] {
            let phi = [grid_psi.grid().coord(i), grid_psi.grid().coord(j)];
            let config = FieldConfiguration::new(phi.to_vec(), psi.time()).unwrap();
            let mode = field_guidance_velocity(&psi, &config).unwrap();
            let grid = field.velocity(&phi).unwrap();
            for x in 0..2 {
                assert!((mode[x] - grid[x]).abs() < 1e-6, "{mode:?} vs {grid:?}");
            }
        }
    }
}

#[test]
fn one_phonon_trajectory_matches_grid_run() {
    let m = two_site();
    let psi = one_phonon(&m);
    let phi0 = vec![0.6, 0.1];
    let (dt, steps) = (0.005, 2000);
    let mode = integrate_field_trajectory(&psi, &FieldConfiguration::new(phi0.clone(), 0.0).unwrap(), dt, steps, GuidanceLaw::Standard, 20).unwrap();
    let grid_psi = gridded_wavefunctional(&psi, 128, 0.1).unwrap();
    let h = site_hamiltonian(&m, grid_psi.grid()).unwrap();
    let ens = TrajectoryEnsemble::new(2, phi0, 0.0, None).unwrap();
    let run = integrate_trajectories(&grid_psi, &h, &ens, dt, steps, &IntegrationOptions { record_every: 20, ..Default::default() }).unwrap();
    let mut worst = 0.0f64;
    for f in 0..mode.frames.len() {
        assert!((mode.times[f] - run.ensemble.times()[f]).abs() < 1e-9);
        for x in 0..2 {
            worst = worst.max((mode.frames[f][x] - run.ensemble.frame(f)[x]).abs());
        }
    }
    assert!(worst < 1e-3, "max deviation {worst}");
}

#[test]
fn traced_guidance_reduces_and_is_rotation_invariant() {
    let m = LatticeModel::scalar_field(4, 1.0, 0.8).unwrap();
    let a: Wavefunctional = GaussianWavefunctional::coherent(&m, &[(1, Complex64::new(0.8, 0.3))]).unwrap().into();
    let b: Wavefunctional = GaussianWavefunctional::coherent(&m, &[(1, Complex64::new(-0.8, -0.3))]).unwrap().into();
    let phi = FieldConfiguration::new(vec![0.2, -0.4, 0.1, 0.3], 0.0).unwrap();

    let single = field_guidance_velocity(&a, &phi).unwrap();
    let one = TracedWavefunctional::new(vec![a.clone()]).unwrap();
    let v1 = traced_nonontic_demo(&one, &phi).unwrap();
    for (x, y) in single.iter().zip(&v1) {
        assert!((x - y).abs() < 1e-14);
    }

    let mix = TracedWavefunctional::new(vec![a.clone(), b.clone()]).unwrap();
    let v = traced_nonontic_demo(&mix, &phi).unwrap();
    let (c, s) = (0.3f64.cos(), 0.3f64.sin());
    let phase = Complex64::from_polar(1.0, 1.1);
    let u = vec![Complex64::new(c, 0.0), -phase.conj() * s, phase * s, Complex64::new(c, 0.0)];
    let vr = traced_nonontic_demo(&mix.rotated(&u).unwrap(), &phi).unwrap();
    for (x, y) in v.iter().zip(&vr) {
        assert!((x - y).abs() < 1e-10);
    }

    // Density-weighted combination of the single-component velocities.
    let basis = ModeBasis::new(&m);
    let q = basis.to_modes(&phi.values).unwrap();
    let (aa, ab) = (a.amplitude(&q).unwrap(), b.amplitude(&q).unwrap());
    let (da, db) = ((2.0 * aa.log_scale).exp() * aa.value.norm_sqr(), (2.0 * ab.log_scale).exp() * ab.value.norm_sqr());
    let (va, vb) = (field_guidance_velocity(&a, &phi).unwrap(), field_guidance_velocity(&b, &phi).unwrap());
    for x in 0..4 {
        let expect = (da * va[x] + db * vb[x]) / (da + db);
        assert!((v[x] - expect).abs() < 1e-12);
    }
}

#[test]
fn field_equivariance_ground_and_coherent() {
    let m = LatticeModel::scalar_field(8, 1.0, 0.7).unwrap();
    let ground = GaussianWavefunctional::ground(&m);
    let opts = FieldEquivarianceOptions { members: 20_000, seed: 1, time: 2.0, steps: 40, ..Default::default() };
    let r = field_equivariance(&ground, &opts).unwrap();
    assert!(r.modes.iter().all(|m| m.variance_error < r.variance_bound), "{r:?}");
    assert!(r.modes.iter().all(|m| (m.expected_mean).abs() < 1e-12));

    let coh = GaussianWavefunctional::coherent(&m, &[(1, Complex64::new(1.5, 0.0)), (3, Complex64::new(0.0, 1.0))]).unwrap();
    let r = field_equivariance(&coh, &opts).unwrap();
    assert!(r.modes.iter().all(|m| m.mean_z < r.mean_bound), "{r:?}");
    let m1 = &r.modes[1];
    let expect = coh.at_time(2.0).unwrap().mode(1).unwrap().center;
    assert!((m1.expected_mean - expect).abs() < 1e-12);

    let zero = field_equivariance(&coh, &FieldEquivarianceOptions { initial: InitialEnsemble::AllZero, ..opts.clone() }).unwrap();
    assert!(!zero.passed);
    assert!(zero.modes.iter().all(|m| m.variance_error > 0.99));

    let flipped = field_equivariance(&coh, &FieldEquivarianceOptions { law: GuidanceLaw::SignFlipped, ..opts }).unwrap();
    assert!(!flipped.passed);
}
