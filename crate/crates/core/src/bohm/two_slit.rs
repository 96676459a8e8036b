use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ensemble::{sample_born, TrajectoryEnsemble};
use super::integrate::TrajectoryIntegrator;
use crate::qm::{Boundary, HamiltonianSpec, SpatialGrid, WaveFunction};
use crate::stats::histogram;
use crate::{Error, Result};

/// Two-slit geometry on a periodic 2D grid. Axis 0 is transverse (`x`),
/// axis 1 is the propagation direction (`y`); the barrier is the band
/// `|y − barrier_y| < thickness/2` with openings of width `slit_width`
/// centred at `±slit_offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoSlitConfig {
    pub points: usize,
    pub spacing: f64,
    pub mass: f64,
    pub momentum: f64,
    pub start_y: f64,
    pub width_x: f64,
    pub width_y: f64,
    pub barrier_y: f64,
    pub thickness: f64,
    pub height: f64,
    pub slit_offset: f64,
    pub slit_width: f64,
    /// Which slits are open (`[left, right]`).
    pub open: [bool; 2],
    pub screen_y: f64,
    /// Half-width of the screen window used for the histogram.
    pub screen_half_width: f64,
    pub bins: usize,
    pub dt: f64,
    pub duration: f64,
    pub members: usize,
    pub seed: u64,
    pub bundle: usize,
    pub record_every: usize,
    /// Minima only count when both flanking maxima exceed this fraction of the peak.
    pub significance: f64,
}

impl Default for TwoSlitConfig {
    fn default() -> Self {
        TwoSlitConfig {
            points: 256,
            spacing: 0.2,
            mass: 1.0,
            momentum: 4.0,
            start_y: -8.0,
            width_x: 5.0,
            width_y: 2.0,
            barrier_y: 0.0,
            thickness: 0.6,
            height: 50.0,
            slit_offset: 3.0,
            slit_width: 1.0,
            open: [true, true],
            screen_y: 12.0,
            screen_half_width: 12.0,
            bins: 64,
            dt: 0.01,
            duration: 6.5,
            members: 30_000,
            seed: 11,
            bundle: 200,
            record_every: 10,
            significance: 0.1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FringeMinimum {
    pub position: f64,
    pub contrast: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoSlitResult {
    pub bin_centers: Vec<f64>,
    pub counts: Vec<usize>,
    /// Arrival probability density per unit length on the screen window.
    pub density: Vec<f64>,
    pub arrivals: usize,
    pub members: usize,
    pub minima: Vec<FringeMinimum>,
    /// Minima with contrast above 0.5.
    pub strong_minima: usize,
    /// `Σ_b |p_b − p_{mirror(b)}|` over the normalized histogram.
    pub symmetry_l1: f64,
    /// Members whose transverse coordinate changed sign during the run.
    pub axis_crossings: usize,
    pub unresolved: usize,
    #[serde(skip)]
    pub bundle: TrajectoryEnsemble,
}

impl TwoSlitConfig {
    pub fn grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(2, self.points, self.spacing, Boundary::Periodic)
    }

    pub fn hamiltonian(&self, grid: &SpatialGrid) -> HamiltonianSpec {
        let potential = (0..grid.total_points())
            .map(|p| {
                let [x, y] = grid.point(p);
                if (y - self.barrier_y).abs() >= 0.5 * self.thickness {
                    return 0.0;
                }
                let in_slit = |c: f64| (x - c).abs() < 0.5 * self.slit_width;
                let open = (self.open[0] && in_slit(-self.slit_offset)) || (self.open[1] && in_slit(self.slit_offset));
                if open {
                    0.0
                } else {
                    self.height
                }
            })
            .collect();
        HamiltonianSpec::new(vec![self.mass; 2], potential)
    }

    pub fn initial_state(&self, grid: &SpatialGrid) -> Result<WaveFunction> {
        WaveFunction::from_fn(grid.clone(), |x, y| {
            let env = (-x * x / (4.0 * self.width_x.powi(2)) - (y - self.start_y).powi(2) / (4.0 * self.width_y.powi(2))).exp();
            Complex64::from_polar(env, self.momentum * y)
        })?
        .normalized()
    }
}

pub fn two_slit_experiment(config: &TwoSlitConfig) -> Result<TwoSlitResult> {
    if config.members < 2 || config.bins < 2 || config.bins % 2 != 0 {
        return Err(Error::invalid("two-slit needs at least 2 members and an even number of bins"));
    }
    let grid = config.grid()?;
    let h = config.hamiltonian(&grid);
    let psi = config.initial_state(&grid)?;

    // Mirrored pairs: the second half is the first reflected through x = 0,
    // so sampling noise cannot break the left-right symmetry.
    let half = sample_born(&psi, config.members.div_ceil(2), config.seed)?;
    let mut positions = half.positions().to_vec();
    positions.extend(half.positions().chunks(2).map(|p| [-p[0], p[1]]).flatten());
    positions.truncate(2 * config.members);
    let ensemble = TrajectoryEnsemble::new(2, positions, psi.time(), Some(config.seed))?;

    let mut integ = TrajectoryIntegrator::new(&psi, &h, &ensemble, config.dt, super::guidance::DEFAULT_NODE_THRESHOLD)?;
    let steps = (config.duration / config.dt).ceil() as usize;
    let m = config.members;
    let stride = (m / config.bundle.max(1)).max(1);
    let picked: Vec<usize> = (0..m).step_by(stride).take(config.bundle.max(1)).collect();
    let pick = |pos: &[f64]| picked.iter().flat_map(|&i| [pos[2 * i], pos[2 * i + 1]]).collect::<Vec<_>>();
    let mut bundle = TrajectoryEnsemble::new(2, pick(ensemble.positions()), psi.time(), Some(config.seed))?;

    // Side of the axis each member is on; a sign change only counts as a
    // crossing when the member moved continuously (not through the x wrap).
    let mut side: Vec<bool> = ensemble.positions().chunks(2).map(|p| p[0] > 0.0).collect();
    let mut crossed = vec![false; m];
    let mut arrival: Vec<Option<f64>> = vec![None; m];
    let mut prev = ensemble.positions().to_vec();
    let half_len = 0.5 * grid.length();
    for s in 1..=steps {
        integ.step()?;
        let now = integ.positions();
        for i in 0..m {
            let (x0, y0, x1, y1) = (prev[2 * i], prev[2 * i + 1], now[2 * i], now[2 * i + 1]);
            if (x1 > 0.0) != side[i] {
                if (x1 - x0).abs() < half_len {
                    crossed[i] = true;
                }
                side[i] = x1 > 0.0;
            }
            if arrival[i].is_none() && y0 < config.screen_y && y1 >= config.screen_y && (y1 - y0).abs() < half_len {
                let f = (config.screen_y - y0) / (y1 - y0);
                arrival[i] = Some(x0 + f * (x1 - x0));
            }
        }
        prev.copy_from_slice(now);
        if s % config.record_every.max(1) == 0 || s == steps {
            bundle.push_frame(integ.time(), pick(now))?;
        }
    }

    let hits: Vec<f64> = arrival.iter().flatten().copied().collect();
    if hits.len() * 100 < m {
        return Err(Error::Timeout(format!(
            "only {} of {m} members reached the screen within t = {}",
            hits.len(),
            integ.time()
        )));
    }
    let (lo, hi) = (-config.screen_half_width, config.screen_half_width);
    let counts = histogram(&hits, lo, hi, config.bins);
    let w = (hi - lo) / config.bins as f64;
    let inside: usize = counts.iter().sum();
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / inside.max(1) as f64).collect();
    let symmetry_l1 = (0..config.bins).map(|b| (probs[b] - probs[config.bins - 1 - b]).abs()).sum();
    let minima = fringe_minima(&probs, config.significance)
        .into_iter()
        .map(|(b, c)| FringeMinimum { position: lo + (b as f64 + 0.5) * w, contrast: c })
        .collect::<Vec<_>>();
    Ok(TwoSlitResult {
        bin_centers: (0..config.bins).map(|b| lo + (b as f64 + 0.5) * w).collect(),
        density: probs.iter().map(|p| p / w).collect(),
        counts,
        arrivals: hits.len(),
        members: m,
        strong_minima: minima.iter().filter(|f| f.contrast > 0.5).count(),
        minima,
        symmetry_l1,
        axis_crossings: crossed.iter().filter(|c| **c).count(),
        unresolved: integ.unresolved().len(),
        bundle,
    })
}

/// Local minima of a histogram with their contrast
/// `(p − m) / (p + m)`, where `p` is the lower of the two flanking maxima
/// (found by walking outwards while the histogram keeps rising). Minima whose
/// flanking maxima are below `significance × peak` are dropped.
pub fn fringe_minima(h: &[f64], significance: f64) -> Vec<(usize, f64)> {
    let peak = h.iter().copied().fold(0.0, f64::max);
    let n = h.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        // Treat a flat run as one minimum.
        let mut j = i;
        while j + 1 < n && h[j + 1] == h[i] {
            j += 1;
        }
        if j + 1 < n && h[i - 1] > h[i] && h[j + 1] > h[i] {
            let mut l = i - 1;
            while l > 0 && h[l - 1] >= h[l] {
                l -= 1;
            }
            let mut r = j + 1;
            while r + 1 < n && h[r + 1] >= h[r] {
                r += 1;
            }
            let p = h[l].min(h[r]);
            if p >= significance * peak {
                out.push(((i + j) / 2, (p - h[i]) / (p + h[i])));
            }
        }
        i = j + 1;
    }
    out
}
