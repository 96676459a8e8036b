use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::LatticeModel;
use crate::linalg::{lowest_eigenpairs, EigenOptions, LinearOperator, DEFAULT_DIMENSION_CAP};
use crate::qm::{kinetic_matrix, Boundary};
use crate::{Error, Result};

/// Phonon occupation numbers; modes not listed are empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockState {
    occupations: BTreeMap<usize, u32>,
}

impl FockState {
    pub fn vacuum() -> Self {
        FockState::default()
    }

    pub fn single(mode: usize, n: u32) -> Self {
        FockState::vacuum().with(mode, n)
    }

    pub fn with(mut self, mode: usize, n: u32) -> Self {
        if n == 0 {
            self.occupations.remove(&mode);
        } else {
            self.occupations.insert(mode, n);
        }
        self
    }

    pub fn occupation(&self, mode: usize) -> u32 {
        self.occupations.get(&mode).copied().unwrap_or(0)
    }

    pub fn occupied(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.occupations.iter().map(|(m, n)| (*m, *n))
    }

    pub fn total_quanta(&self) -> u32 {
        self.occupations.values().sum()
    }
}

/// `E = Σ_k ħω_k (n_k + ½)`.
pub fn fock_energy(model: &LatticeModel, state: &FockState) -> Result<f64> {
    if let Some((m, _)) = state.occupied().find(|(m, _)| *m >= model.sites()) {
        return Err(Error::OutOfRange(format!("mode {m} does not exist on {} sites", model.sites())));
    }
    let w = model.dispersion();
    Ok(model.hbar() * w.iter().enumerate().map(|(k, wk)| wk * (state.occupation(k) as f64 + 0.5)).sum::<f64>())
}

/// The `count` lowest Fock energies, sorted, with degeneracies repeated.
pub fn fock_levels(model: &LatticeModel, count: usize) -> Result<Vec<f64>> {
    if model.has_zero_mode() {
        return Err(Error::ZeroMode);
    }
    let w = model.dispersion();
    let e0 = model.vacuum_energy();
    let hbar = model.hbar();
    let w_min = w.iter().copied().fold(f64::INFINITY, f64::min);
    // The softest mode's ladder alone supplies `count` levels below this cap.
    let cap = e0 + hbar * w_min * count as f64 + 1e-12;
    let mut out = Vec::new();
    fn walk(w: &[f64], k: usize, energy: f64, cap: f64, hbar: f64, out: &mut Vec<f64>) {
        if k == w.len() {
            out.push(energy);
            return;
        }
        let mut e = energy;
        while e <= cap {
            walk(w, k + 1, e, cap, hbar, out);
            e += hbar * w[k];
        }
    }
    walk(&w, 0, e0, cap, hbar, &mut out);
    out.sort_by(f64::total_cmp);
    out.truncate(count);
    Ok(out)
}

/// Per-site position grid for the brute-force field diagonalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteGrid {
    pub points: usize,
    /// Grid covers `[−half_width, half_width]` in site-coordinate units.
    pub half_width: f64,
}

impl SiteGrid {
    /// Defaults tuned to resolve the low tower: 64, 32, 16 points for 1, 2, 3
    /// sites, extending over several ground-state widths of the softest mode.
    pub fn default_for(model: &LatticeModel) -> Result<Self> {
        let (points, widths) = match model.sites() {
            1 => (64, 10.0),
            2 => (32, 7.0),
            3 => (16, 4.0),
            n => return Err(Error::Unsupported(format!("brute-force field eigens need N ≤ 3 sites, got {n}"))),
        };
        let w_min = model.dispersion().into_iter().fold(f64::INFINITY, f64::min);
        if !(w_min > 0.0) {
            return Err(Error::ZeroMode);
        }
        Ok(SiteGrid { points, half_width: widths * (model.hbar() / (model.inertia() * w_min)).sqrt() })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Cell-centred nodes `−w + (j + ½)Δ`.
    pub fn coords(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.points).map(|j| -self.half_width + (j as f64 + 0.5) * dx).collect()
    }
}

/// Coupled-oscillator Hamiltonian on the tensor grid of `N` site coordinates
/// (periodic Fourier DVR kinetic term per site).
pub struct FieldGridHamiltonian {
    sites: usize,
    points: usize,
    kinetic: Vec<f64>,
    potential: Vec<f64>,
}

impl FieldGridHamiltonian {
    pub fn new(model: &LatticeModel, grid: &SiteGrid, cap: usize) -> Result<Self> {
        let n = model.sites();
        let p = grid.points;
        let dim = p.checked_pow(n as u32).unwrap_or(usize::MAX);
        if dim > cap {
            return Err(Error::SizeCap { dimension: dim, cap });
        }
        let coords = grid.coords();
        let k = model.stiffness();
        let potential = (0..dim)
            .map(|flat| {
                let phi: Vec<f64> = (0..n).map(|s| coords[(flat / p.pow((n - 1 - s) as u32)) % p]).collect();
                0.5 * (0..n).map(|x| (0..n).map(|y| phi[x] * k[x * n + y] * phi[y]).sum::<f64>()).sum::<f64>()
            })
            .collect();
        let kinetic = kinetic_matrix(p, grid.spacing(), Boundary::Periodic, model.inertia(), model.hbar());
        Ok(FieldGridHamiltonian { sites: n, points: p, kinetic, potential })
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }
}

impl LinearOperator<f64> for FieldGridHamiltonian {
    fn dim(&self) -> usize {
        self.potential.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let p = self.points;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.potential[i] * x[i];
        }
        for s in 0..self.sites {
            let stride = p.pow((self.sites - 1 - s) as u32);
            for i in 0..x.len() {
                let a = (i / stride) % p;
                let base = i - a * stride;
                let row = &self.kinetic[a * p..(a + 1) * p];
                let mut acc = 0.0;
                for (b, kab) in row.iter().enumerate() {
                    acc += kab * x[base + b * stride];
                }
                y[i] += acc;
            }
        }
    }
}

/// Lowest `count` energies of the lattice Hamiltonian by direct
/// diagonalization on a per-site grid (`N ≤ 3`).
pub fn brute_force_field_eigens(model: &LatticeModel, grid: Option<&SiteGrid>, count: usize) -> Result<Vec<f64>> {
    if model.sites() > 3 {
        return Err(Error::Unsupported(format!("brute-force field eigens need N ≤ 3 sites, got {}", model.sites())));
    }
    let default;
    let grid = match grid {
        Some(g) => g,
        None => {
            default = SiteGrid::default_for(model)?;
            &default
        }
    };
    let op = FieldGridHamiltonian::new(model, grid, DEFAULT_DIMENSION_CAP)?;
    let pairs = lowest_eigenpairs::<f64, _>(&op, count, &EigenOptions { tol: 1e-10, ..Default::default() })?;
    Ok(pairs.values)
}
