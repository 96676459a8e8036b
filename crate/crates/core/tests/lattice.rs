use bohmlab::lattice::{
    brute_force_field_eigens, fock_energy, fock_levels, two_point_function, Event, FockState, GaussianWavefunctional,
    LatticeModel, ModeBasis, SiteGrid,
};
use bohmlab::field::site_hamiltonian;
use bohmlab::qm::{brute_force_eigens, evolve_split_step, Boundary, HamiltonianSpec, SpatialGrid, WaveFunction};
use bohmlab::Complex64;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn long_wavelength_dispersion_is_linear_and_deviation_grows() {
    let m = LatticeModel::atom_chain(512, 1.0, 1.0, 1.0).unwrap();
    let cs = m.sound_speed();
    let mut prev = 0.0;
    for j in 1..=256 {
        let k = m.wavenumber(j);
        let ratio = m.omega(j) / (cs * k);
        if k * m.spacing() <= 0.2 {
            assert!((0.998..=1.0).contains(&ratio), "j={j} ratio={ratio}");
        }
        let dev = 1.0 - ratio;
        assert!(dev >= prev - 1e-15, "deviation not monotone at j={j}");
        prev = dev;
    }
}

#[test]
fn n2_chain_matches_fock_enumeration() {
    let m = LatticeModel::pinned_chain(2, 1.0, 1.0, 0.5, 1.0).unwrap();
    let brute = brute_force_field_eigens(&m, None, 6).unwrap();
    let fock = fock_levels(&m, 6).unwrap();
    for (b, f) in brute.iter().zip(&fock) {
        assert!(rel(*b, *f) < 1e-5, "{brute:?} vs {fock:?}");
    }
}

#[test]
fn decoupled_sites_give_degenerate_ladders() {
    let m = LatticeModel::pinned_chain(2, 1.0, 1.0, 0.0, 1.0).unwrap();
    let e = brute_force_field_eigens(&m, None, 6).unwrap();
    let expect = [1.0, 2.0, 2.0, 3.0, 3.0, 3.0];
    for (a, b) in e.iter().zip(expect) {
        assert!(rel(*a, b) < 1e-6, "{e:?}");
    }
}

#[test]
fn single_site_ladder() {
    let m = LatticeModel::scalar_field(1, 1.0, 1.5).unwrap();
    let e = brute_force_field_eigens(&m, None, 6).unwrap();
    for (n, v) in e.iter().enumerate() {
        assert!(rel(*v, 1.5 * (n as f64 + 0.5)) < 1e-8);
    }
    let two = fock_energy(&m, &FockState::single(0, 2)).unwrap();
    assert!((two - 3.75).abs() < 1e-14);
}

#[test]
fn finer_site_grid_moves_toward_exact_levels() {
    let m = LatticeModel::pinned_chain(2, 1.0, 1.0, 0.5, 1.0).unwrap();
    let exact = fock_levels(&m, 4).unwrap();
    let coarse = brute_force_field_eigens(&m, Some(&SiteGrid { points: 16, half_width: 5.0 }), 4).unwrap();
    let fine = brute_force_field_eigens(&m, Some(&SiteGrid { points: 24, half_width: 6.0 }), 4).unwrap();
    let err = |v: &[f64]| v.iter().zip(&exact).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
    assert!(err(&fine) < err(&coarse));
}

#[test]
fn squeezed_width_matches_grid_evolution() {
    // Single mode: ω = 1.3; compare ⟨q²⟩(t) from the closed form against
    // split-step evolution of the same Gaussian.
    let w = 1.3;
    let m = LatticeModel::scalar_field(1, 1.0, w).unwrap();
    let omega0 = Complex64::new(3.0, 0.5);
    let g = GaussianWavefunctional::squeezed(&m, 0, omega0).unwrap();
    let grid = SpatialGrid::new(1, 256, 0.05, Boundary::Periodic).unwrap();
    let h = site_hamiltonian(&m, &grid).unwrap();
    let basis = ModeBasis::new(&m);
    let mut psi = WaveFunction::from_fn(grid.clone(), |phi, _| {
        let q = basis.to_modes(&[phi]).unwrap()[0];
        (-omega0 * q * q / 2.0).exp()
    })
    .unwrap()
    .normalized()
    .unwrap();
    let dt = 0.001;
    let q2 = psi.observable(|phi, _| basis.to_modes(&[phi]).unwrap()[0].powi(2));
    for step in 1..=6 {
        psi = evolve_split_step(&psi, &h, dt, 500).unwrap();
        let t = step as f64 * 0.5;
        let grid_var = psi.expectation(&q2).unwrap();
        let closed = g.evolve_gaussian(t).unwrap().mode(0).unwrap().variance(1.0);
        assert!((grid_var - closed).abs() < 1e-4, "t={t}: {grid_var} vs {closed}");
    }
}

#[test]
fn two_point_function_matches_brute_force_eigenbasis() {
    let m = LatticeModel::scalar_field(2, 1.0, 1.0).unwrap();
    // ω = 1, √5; widths of the softest mode set the grid.
    let n = 48;
    let spacing = 14.0 / n as f64;
    let grid = SpatialGrid::new(2, n, spacing, Boundary::Periodic).unwrap();
    let h = site_hamiltonian(&m, &grid).unwrap();
    let states = brute_force_eigens(&grid, &h, 4).unwrap();
    let (e0, ground) = &states[0];
    let phi_obs = |site: usize| ground.observable(move |x, y| if site == 0 { x } else { y });
    let matrix_element = |a: &WaveFunction, obs: &[f64], b: &WaveFunction| -> Complex64 {
        let dv = grid.cell_volume();
        a.amplitudes().iter().zip(b.amplitudes()).zip(obs).map(|((u, v), o)| u.conj() * v * o * dv).sum()
    };
    for (x, xp, dt) in [(0usize, 0usize, 0.0), (0, 1, 0.0), (0, 1, 0.7), (1, 1, 2.3)] {
        let (ox, oxp) = (phi_obs(x), phi_obs(xp));
        let mut direct = Complex64::new(0.0, 0.0);
        for (en, state) in &states[1..] {
            let a = matrix_element(ground, &ox, state);
            let b = matrix_element(state, &oxp, ground);
            direct += a * b * Complex64::from_polar(1.0, -(en - e0) * dt);
        }
        let w = two_point_function(&m, Event::new(x as f64, dt), Event::new(xp as f64, 0.0), false).unwrap();
        assert!((w - direct).norm() < 1e-6, "({x},{xp},{dt}): {w} vs {direct}");
    }
}
