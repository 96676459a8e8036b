use std::io::{Read, Write};

use serde::Serialize;

use super::grid::{max_abs, GaugeGrid, ScalarField, Spectral, VectorField};
use super::potential::{coulomb_project, solve_scalar_potential, PoissonMode};
use crate::{Error, Result};

/// Potentials and source at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeConfiguration {
    pub grid: GaugeGrid,
    pub phi: ScalarField,
    pub a: VectorField,
    pub rho: ScalarField,
}

impl GaugeConfiguration {
    pub fn new(grid: GaugeGrid, phi: ScalarField, a: VectorField, rho: ScalarField) -> Result<Self> {
        grid.check(&phi, "scalar potential")?;
        for c in &a {
            grid.check(c, "vector potential")?;
        }
        grid.check(&rho, "charge density")?;
        Ok(GaugeConfiguration { grid, phi, a, rho })
    }

    pub fn vacuum(grid: GaugeGrid) -> Self {
        GaugeConfiguration { grid, phi: grid.zeros(), a: grid.zero_vector(), rho: grid.zeros() }
    }

    /// Coulomb-gauge potentials for `rho` and an arbitrary `a`: `A` is
    /// projected transverse and `φ` solves `∇²φ = −ρ` instantaneously.
    pub fn coulomb(spec: &Spectral, rho: ScalarField, a: &VectorField, mode: PoissonMode) -> Result<Self> {
        let phi = solve_scalar_potential(spec, &rho, mode)?;
        let a = coulomb_project(spec, a)?;
        Ok(GaugeConfiguration { grid: spec.grid(), phi, a, rho })
    }

    /// Static gauge transformation `A → A + ∇λ` (`∂_tλ = 0`).
    pub fn transformed_static(&self, spec: &Spectral, lambda: &[f64]) -> Result<Self> {
        self.grid.check(lambda, "gauge function")?;
        let g = spec.gradient(lambda);
        let mut out = self.clone();
        for (c, d) in out.a.iter_mut().zip(&g) {
            c.iter_mut().zip(d).for_each(|(x, y)| *x += y);
        }
        Ok(out)
    }

    /// Columns `i,j,k,phi,ax,ay,az,rho`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "j", "k", "phi", "ax", "ay", "az", "rho"])?;
        for p in 0..self.grid.len() {
            let s = self.grid.site(p);
            w.serialize((s[0], s[1], s[2], self.phi[p], self.a[0][p], self.a[1][p], self.a[2][p], self.rho[p]))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format of [`write_csv`](Self::write_csv); every site must
    /// appear exactly once.
    pub fn read_csv<R: Read>(grid: GaugeGrid, input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut cfg = GaugeConfiguration::vacuum(grid);
        let mut seen = vec![false; grid.len()];
        for row in rdr.deserialize() {
            let (i, j, k, phi, ax, ay, az, rho): (usize, usize, usize, f64, f64, f64, f64, f64) = row?;
            if [i, j, k].iter().any(|&x| x >= grid.points()) {
                return Err(Error::Shape(format!("site ({i},{j},{k}) outside a {}³ grid", grid.points())));
            }
            let p = grid.index([i, j, k]);
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::invalid(format!("site ({i},{j},{k}) listed twice")));
            }
            cfg.phi[p] = phi;
            cfg.a[0][p] = ax;
            cfg.a[1][p] = ay;
            cfg.a[2][p] = az;
            cfg.rho[p] = rho;
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(Error::Shape(format!("site {:?} missing", grid.site(p))));
        }
        GaugeConfiguration::new(grid, cfg.phi, cfg.a, cfg.rho)
    }
}

/// Staggered time series: `A` at `t0 + i·dt` for `i = 0..=n`, `φ` and `ρ` at
/// the interval midpoints `t0 + (i + ½)·dt` for `i = 0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeSeries {
    pub grid: GaugeGrid,
    pub t0: f64,
    pub dt: f64,
    pub a: Vec<VectorField>,
    pub phi: Vec<ScalarField>,
    pub rho: Vec<ScalarField>,
}

impl GaugeSeries {
    pub fn new(grid: GaugeGrid, t0: f64, dt: f64, a: Vec<VectorField>, phi: Vec<ScalarField>, rho: Vec<ScalarField>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("series time step must be positive"));
        }
        if a.len() < 2 {
            return Err(Error::NeedsHistory(a.len()));
        }
        if phi.len() + 1 != a.len() || rho.len() != phi.len() {
            return Err(Error::Shape(format!(
                "{} vector snapshots need {} scalar and charge snapshots, got {} and {}",
                a.len(),
                a.len() - 1,
                phi.len(),
                rho.len()
            )));
        }
        for v in &a {
            for c in v {
                grid.check(c, "vector potential")?;
            }
        }
        for (f, r) in phi.iter().zip(&rho) {
            grid.check(f, "scalar potential")?;
            grid.check(r, "charge density")?;
        }
        Ok(GaugeSeries { grid, t0, dt, a, phi, rho })
    }

    /// Two identical `A` snapshots around a static configuration.
    pub fn from_static(cfg: &GaugeConfiguration, dt: f64) -> Result<Self> {
        GaugeSeries::new(cfg.grid, 0.0, dt, vec![cfg.a.clone(), cfg.a.clone()], vec![cfg.phi.clone()], vec![cfg.rho.clone()])
    }

    pub fn intervals(&self) -> usize {
        self.phi.len()
    }

    /// Configuration at the midpoint of interval `i`, `A` averaged.
    pub fn midpoint(&self, i: usize) -> GaugeConfiguration {
        let a = std::array::from_fn(|c| self.a[i][c].iter().zip(&self.a[i + 1][c]).map(|(x, y)| 0.5 * (x + y)).collect());
        GaugeConfiguration { grid: self.grid, phi: self.phi[i].clone(), a, rho: self.rho[i].clone() }
    }
}

/// `E` and `B` on the grid at one time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldStrength {
    pub time: f64,
    pub e: VectorField,
    pub b: VectorField,
}

impl FieldStrength {
    /// Largest component difference over `E` and `B`.
    pub fn max_difference(&self, other: &FieldStrength) -> f64 {
        self.e
            .iter()
            .chain(&self.b)
            .zip(other.e.iter().chain(&other.b))
            .flat_map(|(x, y)| x.iter().zip(y).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }

    pub fn max_component(&self) -> f64 {
        self.e.iter().chain(&self.b).map(|c| max_abs(c)).fold(0.0, f64::max)
    }

    pub fn max_div_b(&self, spec: &Spectral) -> f64 {
        max_abs(&spec.divergence(&self.b))
    }
}

/// `E = −∇φ − ∂_tA` and `B = ∇×A` at each interval midpoint; `∂_tA` is the
/// centred difference of the bracketing snapshots.
pub fn field_strength(spec: &Spectral, series: &GaugeSeries) -> Result<Vec<FieldStrength>> {
    if series.a.len() < 2 {
        return Err(Error::NeedsHistory(series.a.len()));
    }
    if spec.grid() != series.grid {
        return Err(Error::Shape("spectral plan and series use different grids".into()));
    }
    Ok((0..series.intervals())
        .map(|i| {
            let mid = series.midpoint(i);
            let grad = spec.gradient(&mid.phi);
            let e = std::array::from_fn(|c| {
                grad[c]
                    .iter()
                    .zip(series.a[i + 1][c].iter().zip(&series.a[i][c]))
                    .map(|(g, (a1, a0))| -g - (a1 - a0) / series.dt)
                    .collect()
            });
            FieldStrength { time: series.t0 + (i as f64 + 0.5) * series.dt, e, b: spec.curl(&mid.a) }
        })
        .collect())
}

/// `A_i → A_i + ∇λ_i`, `φ_{i+½} → φ_{i+½} − (λ_{i+1} − λ_i)/dt`, with one
/// gauge function per `A` snapshot.
pub fn gauge_transform(spec: &Spectral, series: &GaugeSeries, lambda: &[ScalarField]) -> Result<GaugeSeries> {
    if lambda.len() < 2 {
        return Err(Error::NeedsHistory(lambda.len()));
    }
    if lambda.len() != series.a.len() {
        return Err(Error::Shape(format!("{} gauge snapshots for {} potential snapshots", lambda.len(), series.a.len())));
    }
    for l in lambda {
        series.grid.check(l, "gauge function")?;
    }
    let mut out = series.clone();
    for (a, l) in out.a.iter_mut().zip(lambda) {
        let g = spec.gradient(l);
        for (c, d) in a.iter_mut().zip(&g) {
            c.iter_mut().zip(d).for_each(|(x, y)| *x += y);
        }
    }
    for (i, phi) in out.phi.iter_mut().enumerate() {
        for (p, x) in phi.iter_mut().enumerate() {
            *x -= (lambda[i + 1][p] - lambda[i][p]) / series.dt;
        }
    }
    Ok(out)
}
