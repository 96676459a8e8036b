use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{field_strength, gauge_transform, GaugeConfiguration, GaugeSeries};
use super::grid::{max_abs, GaugeGrid, ScalarField, Spectral, VectorField};
use super::potential::{coulomb_project, poisson_residual, solve_scalar_potential, PoissonMode};
use crate::bohm::member_rng;
use crate::{Error, Result};

/// Sum of `modes` random plane waves with wavevector components in
/// `2π/L · {−2..2}`; band limited, so spectral derivatives are exact.
pub fn random_smooth_field<R: Rng>(grid: GaugeGrid, rng: &mut R, modes: usize) -> ScalarField {
    let len = grid.points() as f64 * grid.spacing();
    let terms: Vec<([f64; 3], f64, f64)> = (0..modes)
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

fn random_vector<R: Rng>(grid: GaugeGrid, rng: &mut R, modes: usize) -> VectorField {
    std::array::from_fn(|_| random_smooth_field(grid, rng, modes))
}

fn neutral<R: Rng>(grid: GaugeGrid, rng: &mut R, modes: usize) -> ScalarField {
    let mut rho = random_smooth_field(grid, rng, modes);
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    rho.iter_mut().for_each(|r| *r -= mean);
    rho
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaugeInvarianceOptions {
    pub points: usize,
    pub spacing: f64,
    /// Number of random gauge functions applied to the reference history.
    pub transforms: usize,
    /// `A` snapshots in the reference history.
    pub snapshots: usize,
    pub dt: f64,
    /// Plane waves per random field.
    pub modes: usize,
    pub seed: u64,
}

impl Default for GaugeInvarianceOptions {
    fn default() -> Self {
        GaugeInvarianceOptions { points: 16, spacing: 0.5, transforms: 100, snapshots: 3, dt: 0.05, modes: 6, seed: 3 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeInvarianceReport {
    pub grid: GaugeGrid,
    /// `max |ΔE|, |ΔB|` per transform.
    pub differences: Vec<f64>,
    pub max_field_difference: f64,
    /// Largest field component of the reference history.
    pub field_scale: f64,
    /// `max |∇·A_T|` over the projected snapshots.
    pub max_div_transverse: f64,
    /// `max |∇²φ + ρ|` over the periodic solves.
    pub poisson_residual: f64,
    pub max_div_b: f64,
    /// First midpoint of the reference history.
    #[serde(skip)]
    pub reference: GaugeConfiguration,
}

/// Builds a random Coulomb-gauge history (transverse `A`, instantaneous
/// periodic `φ` from a neutral `ρ`) and applies `transforms` random
/// time-dependent gauge functions to it. Transform `i` draws from its own
/// RNG stream, so the result does not depend on thread scheduling.
pub fn gauge_invariance_check(opts: &GaugeInvarianceOptions) -> Result<GaugeInvarianceReport> {
    if opts.snapshots < 2 {
        return Err(Error::NeedsHistory(opts.snapshots));
    }
    if opts.modes == 0 {
        return Err(Error::invalid("random fields need at least one plane wave"));
    }
    let grid = GaugeGrid::new(opts.points, opts.spacing)?;
    let spec = Spectral::new(grid);
    let mut rng = member_rng(opts.seed, 0);

    let mut a = Vec::with_capacity(opts.snapshots);
    let mut max_div_transverse = 0.0f64;
    for _ in 0..opts.snapshots {
        let at = coulomb_project(&spec, &random_vector(grid, &mut rng, opts.modes))?;
        max_div_transverse = max_div_transverse.max(max_abs(&spec.divergence(&at)));
        a.push(at);
    }
    let (mut phi, mut rho) = (Vec::new(), Vec::new());
    let mut residual = 0.0f64;
    for _ in 1..opts.snapshots {
        let r = neutral(grid, &mut rng, opts.modes);
        let f = solve_scalar_potential(&spec, &r, PoissonMode::Periodic)?;
        residual = residual.max(poisson_residual(&spec, &f, &r));
        phi.push(f);
        rho.push(r);
    }
    let series = GaugeSeries::new(grid, 0.0, opts.dt, a, phi, rho)?;
    let reference = field_strength(&spec, &series)?;
    let field_scale = reference.iter().map(|f| f.max_component()).fold(0.0, f64::max);
    let max_div_b = reference.iter().map(|f| f.max_div_b(&spec)).fold(0.0, f64::max);

    let differences = (0..opts.transforms)
        .into_par_iter()
        .map(|i| {
            let mut rng = member_rng(opts.seed, i as u64 + 1);
            let lambda: Vec<ScalarField> =
                (0..opts.snapshots).map(|_| random_smooth_field(grid, &mut rng, opts.modes)).collect();
            let moved = field_strength(&spec, &gauge_transform(&spec, &series, &lambda)?)?;
            Ok(moved.iter().zip(&reference).map(|(m, r)| m.max_difference(r)).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(GaugeInvarianceReport {
        grid,
        max_field_difference: differences.iter().copied().fold(0.0, f64::max),
        differences,
        field_scale,
        max_div_transverse,
        poisson_residual: residual,
        max_div_b,
        reference: series.midpoint(0),
    })
}
