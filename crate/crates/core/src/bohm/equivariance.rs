use serde::Serialize;

use super::ensemble::TrajectoryEnsemble;
use super::integrate::stale_check;
use crate::qm::WaveFunction;
use crate::stats::{histogram, ks_statistic};
use crate::{Error, Result};

/// Marginal of `|ψ|²` along one axis as cell probabilities, with a CDF that
/// is linear inside each grid cell.
#[derive(Clone, Debug)]
pub struct GridMarginal {
    lo: f64,
    spacing: f64,
    cells: Vec<f64>,
    cumulative: Vec<f64>,
}

impl GridMarginal {
    pub fn new(psi: &WaveFunction, axis: usize) -> Result<Self> {
        let grid = psi.grid();
        if axis >= grid.dim() {
            return Err(Error::Shape(format!("axis {axis} out of range for a {}D grid", grid.dim())));
        }
        let density = psi.density();
        let mut cells = vec![0.0; grid.points()];
        for (p, d) in density.iter().enumerate() {
            cells[grid.unflatten(p)[axis]] += d;
        }
        let total: f64 = cells.iter().sum();
        if !(total > 0.0) {
            return Err(Error::NonNormalizable(total, 0));
        }
        cells.iter_mut().for_each(|c| *c /= total);
        let mut cumulative = Vec::with_capacity(cells.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for c in &cells {
            acc += c;
            cumulative.push(acc);
        }
        Ok(GridMarginal { lo: grid.origin() - 0.5 * grid.spacing(), spacing: grid.spacing(), cells, cumulative })
    }

    /// Interval covered by the grid cells.
    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.lo + self.cells.len() as f64 * self.spacing)
    }

    pub fn cell_probabilities(&self) -> &[f64] {
        &self.cells
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let s = (x - self.lo) / self.spacing;
        if s <= 0.0 {
            return 0.0;
        }
        let j = s.floor() as usize;
        if j >= self.cells.len() {
            return 1.0;
        }
        self.cumulative[j] + (s - j as f64) * self.cells[j]
    }

    pub fn probability(&self, a: f64, b: f64) -> f64 {
        self.cdf(b) - self.cdf(a)
    }
}

#[derive(Clone, Debug)]
pub struct EquivarianceOptions {
    pub bins: usize,
    /// Histogram range; defaults to the grid support.
    pub range: Option<(f64, f64)>,
}

impl Default for EquivarianceOptions {
    fn default() -> Self {
        EquivarianceOptions { bins: 64, range: None }
    }
}

/// Histogram L1 distance and KS distance between the ensemble and `|ψ|²`,
/// per axis (marginals).
#[derive(Clone, Debug, Serialize)]
pub struct EquivarianceStats {
    pub time: f64,
    pub members: usize,
    pub l1: Vec<f64>,
    pub ks: Vec<f64>,
}

impl EquivarianceStats {
    pub fn max_l1(&self) -> f64 {
        self.l1.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_ks(&self) -> f64 {
        self.ks.iter().copied().fold(0.0, f64::max)
    }
}

pub fn equivariance_statistic(
    ensemble: &TrajectoryEnsemble,
    psi: &WaveFunction,
    opts: &EquivarianceOptions,
) -> Result<EquivarianceStats> {
    stale_check(ensemble.time(), psi.time())?;
    if ensemble.dim() != psi.grid().dim() {
        return Err(Error::Shape("ensemble and grid dimensions differ".into()));
    }
    if opts.bins == 0 {
        return Err(Error::invalid("histogram needs at least one bin"));
    }
    let mut l1 = Vec::new();
    let mut ks = Vec::new();
    for axis in 0..ensemble.dim() {
        let marginal = GridMarginal::new(psi, axis)?;
        let (lo, hi) = opts.range.unwrap_or_else(|| marginal.support());
        let xs = ensemble.coordinates(axis);
        let counts = histogram(&xs, lo, hi, opts.bins);
        let w = (hi - lo) / opts.bins as f64;
        let m = xs.len() as f64;
        let dist: f64 = counts
            .iter()
            .enumerate()
            .map(|(b, &c)| {
                let a = lo + b as f64 * w;
                (c as f64 / m - marginal.probability(a, a + w)).abs()
            })
            .sum();
        l1.push(dist);
        ks.push(ks_statistic(&xs, |x| marginal.cdf(x)));
    }
    Ok(EquivarianceStats { time: psi.time(), members: ensemble.member_count(), l1, ks })
}
