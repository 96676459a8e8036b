use std::f64::consts::PI;

use bohmlab::qm::{brute_force_eigens, energy, evolve_split_step, Boundary, HamiltonianSpec, SpatialGrid, WaveFunction};
use bohmlab::{Complex64, Error};
use proptest::prelude::*;

fn line(points: usize, spacing: f64) -> SpatialGrid {
    SpatialGrid::new(1, points, spacing, Boundary::Periodic).unwrap()
}

fn gaussian(grid: &SpatialGrid, x0: f64, sigma: f64, k: f64) -> WaveFunction {
    WaveFunction::from_fn(grid.clone(), |x, _| Complex64::from_polar((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), k * x))
        .unwrap()
        .normalized()
        .unwrap()
}

fn max_diff(a: &WaveFunction, b: &WaveFunction) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn width(psi: &WaveFunction) -> f64 {
    let mean = psi.expectation(&psi.observable(|x, _| x)).unwrap();
    psi.expectation(&psi.observable(|x, _| (x - mean).powi(2))).unwrap().sqrt()
}

#[test]
fn plane_wave_picks_up_free_phase() {
    let g = line(128, 0.1);
    let k = 2.0 * PI * 5.0 / g.length();
    let (m, hbar) = (1.3, 0.7);
    let psi = WaveFunction::from_fn(g.clone(), |x, _| Complex64::from_polar(1.0, k * x)).unwrap().normalized().unwrap();
    let h = HamiltonianSpec::free(&g, m).with_hbar(hbar);
    let out = evolve_split_step(&psi, &h, 0.01, 100).unwrap();
    let phase = Complex64::from_polar(1.0, -hbar * k * k * 1.0 / (2.0 * m));
    let expect = WaveFunction::new(g, 1, psi.amplitudes().iter().map(|a| a * phase).collect(), 1.0).unwrap();
    assert!(max_diff(&out, &expect) < 1e-10);
    assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
}

#[test]
fn harmonic_ground_gaussian_is_stationary() {
    let g = line(256, 0.1);
    let h = HamiltonianSpec::harmonic(&g, 1.0, 1.0);
    // Ground state of ½x² with m = ħ = 1 has σ² = 1/2.
    let psi = gaussian(&g, 0.0, 0.5f64.sqrt(), 0.0);
    let out = evolve_split_step(&psi, &h, 0.002, 1000).unwrap();
    let (a, b) = (psi.density(), out.density());
    let peak = a.iter().cloned().fold(0.0, f64::max);
    let drift = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-6 * peak, "density drift {drift}");
}

#[test]
fn free_packet_width_follows_closed_form() {
    let g = line(1024, 0.05);
    let (s0, m, hbar) = (1.0, 1.0, 1.0);
    let psi = gaussian(&g, -3.0, s0, 1.0);
    let out = evolve_split_step(&psi, &HamiltonianSpec::free(&g, m), 0.01, 300).unwrap();
    let t = 3.0;
    let expect = s0 * (1.0 + (hbar * t / (2.0 * m * s0 * s0)).powi(2)).sqrt();
    assert!((width(&out) / expect - 1.0).abs() < 1e-4, "{} vs {expect}", width(&out));
    assert!((width(&psi) / s0 - 1.0).abs() < 1e-4);
}

#[test]
fn norm_and_energy_are_conserved() {
    let g = line(128, 0.15);
    let h = HamiltonianSpec::harmonic(&g, 1.0, 1.0);
    let psi = gaussian(&g, 2.0, 0.8, 0.5);
    let e0 = energy(&psi, &h).unwrap();
    let out = evolve_split_step(&psi, &h, 0.001, 10_000).unwrap();
    assert!((out.norm_sqr() - 1.0).abs() < 1e-8);
    let e1 = energy(&out, &h).unwrap();
    assert!(((e1 - e0) / e0).abs() < 1e-6, "{e0} -> {e1}");
}

#[test]
fn eigenstates_rotate_by_their_energy_phase() {
    let g = line(128, 0.15);
    let h = HamiltonianSpec::harmonic(&g, 1.0, 1.0);
    let eig = brute_force_eigens(&g, &h, 3).unwrap();
    let (e, psi) = &eig[2];
    let out = evolve_split_step(psi, &h, 0.001, 1000).unwrap();
    let phase = Complex64::from_polar(1.0, -e * 1.0);
    let expect = WaveFunction::new(g, 1, psi.amplitudes().iter().map(|a| a * phase).collect(), 1.0).unwrap();
    assert!(max_diff(&out, &expect) < 1e-5);
}

#[test]
fn strang_splitting_is_second_order() {
    let g = line(128, 0.15);
    let h = HamiltonianSpec::harmonic(&g, 1.0, 1.3);
    let psi = gaussian(&g, 1.5, 0.6, 0.8);
    let t = 1.0;
    let run = |n: usize| evolve_split_step(&psi, &h, t / n as f64, n).unwrap();
    let reference = run(1600);
    let (coarse, fine) = (max_diff(&run(50), &reference), max_diff(&run(100), &reference));
    let ratio = coarse / fine;
    assert!((3.5..4.5).contains(&ratio), "error ratio {ratio}");
}

#[test]
fn harmonic_spectrum() {
    let g = line(128, 0.15);
    let eig = brute_force_eigens(&g, &HamiltonianSpec::harmonic(&g, 1.0, 1.0), 3).unwrap();
    for (n, (e, _)) in eig.iter().enumerate() {
        assert!((e - (n as f64 + 0.5)).abs() < 1e-4, "E{n} = {e}");
    }
    // Orthonormal within quadrature.
    for i in 0..3 {
        for j in 0..3 {
            let o = eig[i].1.overlap(&eig[j].1).unwrap();
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((o - expect).norm() < 1e-8);
        }
    }
}

#[test]
fn hard_wall_box_levels_scale_as_n_squared() {
    let g = SpatialGrid::new(1, 100, 0.05, Boundary::HardWall).unwrap();
    let eig = brute_force_eigens(&g, &HamiltonianSpec::free(&g, 1.0), 4).unwrap();
    for (n, (e, _)) in eig.iter().enumerate() {
        let ratio = e / eig[0].0;
        let expect = ((n + 1) * (n + 1)) as f64;
        assert!((ratio / expect - 1.0).abs() < 1e-4, "E{}/E1 = {ratio}", n + 1);
    }
}

#[test]
fn single_eigenpair_is_normalized() {
    let g = line(64, 0.2);
    let h = HamiltonianSpec::harmonic(&g, 2.0, 0.7);
    let eig = brute_force_eigens(&g, &h, 1).unwrap();
    assert_eq!(eig.len(), 1);
    assert!((eig[0].1.norm_sqr() - 1.0).abs() < 1e-10);
}

#[test]
fn oversized_problem_is_refused() {
    let g = SpatialGrid::new(2, 128, 0.1, Boundary::Periodic).unwrap();
    let h = HamiltonianSpec::free(&g, 1.0);
    assert!(matches!(brute_force_eigens(&g, &h, 1), Err(Error::SizeCap { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn evolution_is_unitary(x0 in -3.0f64..3.0, s in 0.4f64..1.5, k in -2.0f64..2.0, w in 0.2f64..1.5) {
        let g = line(128, 0.15);
        let h = HamiltonianSpec::harmonic(&g, 1.0, w);
        let out = evolve_split_step(&gaussian(&g, x0, s, k), &h, 0.01, 200).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }
}
