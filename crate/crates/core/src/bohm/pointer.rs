use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ensemble::sample_born;
use super::integrate::{integrate_trajectories, IntegrationOptions};
use crate::qm::{Boundary, HamiltonianSpec, MomentumCoupling, SpatialGrid, WaveFunction};
use crate::stats::binomial_sigma;
use crate::{Error, Result};

/// Von Neumann measurement of the system position by a heavy pointer:
/// `H = p_x²/2m + p_y²/2M + g x p_y` on a 2D grid (axis 0 system, axis 1 pointer).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointerConfig {
    /// Born weights `|c_i|²` of the system packets.
    pub weights: Vec<f64>,
    pub centers: Vec<f64>,
    pub system_width: f64,
    pub system_mass: f64,
    pub pointer_width: f64,
    pub pointer_mass: f64,
    pub coupling: f64,
    pub duration: f64,
    pub dt: f64,
    pub points: usize,
    pub spacing: f64,
    pub runs: usize,
    pub seed: u64,
    /// Required branch separation in pointer widths.
    pub min_separation: f64,
}

impl Default for PointerConfig {
    fn default() -> Self {
        PointerConfig {
            weights: vec![0.8, 0.2],
            centers: vec![-4.0, 4.0],
            system_width: 0.7,
            system_mass: 10.0,
            pointer_width: 0.5,
            pointer_mass: 100.0,
            coupling: 1.0,
            duration: 1.0,
            dt: 0.005,
            points: 128,
            spacing: 0.2,
            runs: 10_000,
            seed: 2024,
            min_separation: 5.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointerResult {
    pub weights: Vec<f64>,
    pub counts: Vec<usize>,
    pub frequencies: Vec<f64>,
    /// Binomial standard deviation per outcome.
    pub sigma: Vec<f64>,
    /// `|f_i − w_i| / σ_i`; zero when `σ_i = 0` and the frequency is exact.
    pub z_scores: Vec<f64>,
    pub within_3_sigma: bool,
    /// Pointer mean and spread in each branch of the final wavefunction.
    pub branch_means: Vec<f64>,
    pub branch_widths: Vec<f64>,
    /// Smallest distance between branch means in units of the widest branch;
    /// `None` with a single branch.
    pub separation: Option<f64>,
    pub unresolved: usize,
    pub warnings: Vec<String>,
}

impl PointerConfig {
    fn validate(&self) -> Result<()> {
        if self.weights.is_empty() || self.weights.len() != self.centers.len() {
            return Err(Error::invalid("pointer needs one center per weight"));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) || self.weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::invalid("weights must be non-negative and not all zero"));
        }
        for (name, v) in [
            ("system_width", self.system_width),
            ("system_mass", self.system_mass),
            ("pointer_width", self.pointer_width),
            ("pointer_mass", self.pointer_mass),
            ("duration", self.duration),
            ("dt", self.dt),
            ("spacing", self.spacing),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if self.runs == 0 {
            return Err(Error::invalid("runs must be at least 1"));
        }
        Ok(())
    }

    /// Initial joint wavefunction `Σ_i √w_i φ(x − x_i) χ(y)`.
    pub fn initial_state(&self) -> Result<(WaveFunction, HamiltonianSpec)> {
        self.validate()?;
        let grid = SpatialGrid::new(2, self.points, self.spacing, Boundary::Periodic)?;
        let total: f64 = self.weights.iter().sum();
        let gauss = |u: f64, s: f64| (-u * u / (4.0 * s * s)).exp();
        let psi = WaveFunction::from_fn(grid.clone(), |x, y| {
            let sys: f64 = self
                .weights
                .iter()
                .zip(&self.centers)
                .map(|(w, c)| (w / total).sqrt() * gauss(x - c, self.system_width))
                .sum();
            Complex64::new(sys * gauss(y, self.pointer_width), 0.0)
        })?
        .normalized()?;
        let h = HamiltonianSpec::new(vec![self.system_mass, self.pointer_mass], vec![0.0; grid.total_points()])
            .with_momentum_coupling(MomentumCoupling { source_axis: 0, target_axis: 1, strength: self.coupling });
        Ok((psi, h))
    }
}

/// Runs `config.runs` joint Bohmian trajectories and records which pointer
/// branch each one ends in.
pub fn pointer_measurement(config: &PointerConfig) -> Result<PointerResult> {
    let (psi, h) = config.initial_state()?;
    let steps = (config.duration / config.dt).round().max(1.0) as usize;
    let ensemble = sample_born(&psi, config.runs, config.seed)?;
    let run = integrate_trajectories(
        &psi,
        &h,
        &ensemble,
        config.dt,
        steps,
        &IntegrationOptions { record_every: steps, ..Default::default() },
    )?;

    let total: f64 = config.weights.iter().sum();
    let weights: Vec<f64> = config.weights.iter().map(|w| w / total).collect();
    let active: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    let (means, widths) = branch_moments(&run.wavefunction, &config.centers);
    let mut separation = None;
    for (ai, &i) in active.iter().enumerate() {
        for &j in &active[ai + 1..] {
            let s = (means[i] - means[j]).abs() / widths[i].max(widths[j]);
            separation = Some(separation.map_or(s, |t: f64| t.min(s)));
        }
    }
    if let Some(s) = separation {
        if s < config.min_separation {
            return Err(Error::Inconclusive { separation: s, required: config.min_separation });
        }
    }

    let mut counts = vec![0usize; weights.len()];
    for y in run.ensemble.coordinates(1) {
        let best = active
            .iter()
            .copied()
            .min_by(|&a, &b| (y - means[a]).abs().total_cmp(&(y - means[b]).abs()))
            .expect("at least one branch");
        counts[best] += 1;
    }
    let m = config.runs;
    let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / m as f64).collect();
    let sigma: Vec<f64> = weights.iter().map(|&w| binomial_sigma(w, m)).collect();
    let z_scores: Vec<f64> = frequencies
        .iter()
        .zip(&weights)
        .zip(&sigma)
        .map(|((f, w), s)| {
            let d = (f - w).abs();
            if *s > 0.0 {
                d / s
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    Ok(PointerResult {
        within_3_sigma: z_scores.iter().all(|z| *z <= 3.0),
        weights,
        counts,
        frequencies,
        sigma,
        z_scores,
        branch_means: means,
        branch_widths: widths,
        separation,
        unresolved: run.unresolved.len(),
        warnings: run.warnings,
    })
}

/// Pointer mean and standard deviation of `|ψ|²` restricted to the system
/// region closest to each center.
fn branch_moments(psi: &WaveFunction, centers: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let grid = psi.grid();
    let n = centers.len();
    let mut w = vec![0.0; n];
    let mut s1 = vec![0.0; n];
    let mut s2 = vec![0.0; n];
    for (p, d) in psi.density().iter().enumerate() {
        let [x, y] = grid.point(p);
        let b = (0..n).min_by(|&a, &b| (x - centers[a]).abs().total_cmp(&(x - centers[b]).abs())).unwrap();
        w[b] += d;
        s1[b] += d * y;
        s2[b] += d * y * y;
    }
    let means: Vec<f64> = (0..n).map(|b| if w[b] > 0.0 { s1[b] / w[b] } else { 0.0 }).collect();
    let widths = (0..n)
        .map(|b| if w[b] > 0.0 { (s2[b] / w[b] - means[b].powi(2)).max(0.0).sqrt() } else { 0.0 })
        .collect();
    (means, widths)
}
