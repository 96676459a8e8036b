use rayon::prelude::*;

use super::ensemble::TrajectoryEnsemble;
use super::guidance::GuidanceField;
use crate::qm::{HamiltonianSpec, Propagator, WaveFunction};
use crate::{Error, Result};

/// Fraction of members allowed to stay stuck at a node before a warning.
pub const UNRESOLVED_WARNING_FRACTION: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct IntegrationOptions {
    /// Record a frame every this many steps (and always at the end).
    pub record_every: usize,
    /// Node threshold relative to the peak density.
    pub node_threshold: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions { record_every: 1, node_threshold: super::guidance::DEFAULT_NODE_THRESHOLD }
    }
}

/// Result of a trajectory run.
#[derive(Clone, Debug)]
pub struct TrajectoryRun {
    pub ensemble: TrajectoryEnsemble,
    pub wavefunction: WaveFunction,
    /// Members frozen because they stayed at a node even with the refined step.
    pub unresolved: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Joint RK4 integrator for `ψ` and the configurations it guides.
///
/// The wavefunction advances in half steps so every RK4 stage sees the exact
/// (propagated) `ψ` at its own time. A member that lands too close to a node
/// is retried with four quarter steps; if that fails too it is frozen and
/// flagged.
pub struct TrajectoryIntegrator {
    h: HamiltonianSpec,
    dt: f64,
    half: Propagator,
    eighth: Option<Propagator>,
    psi: WaveFunction,
    field: GuidanceField,
    positions: Vec<f64>,
    dim: usize,
    frozen: Vec<bool>,
    node_threshold: f64,
}

impl TrajectoryIntegrator {
    pub fn new(
        psi: &WaveFunction,
        h: &HamiltonianSpec,
        ensemble: &TrajectoryEnsemble,
        dt: f64,
        node_threshold: f64,
    ) -> Result<Self> {
        if ensemble.dim() != psi.grid().dim() {
            return Err(Error::Shape("ensemble and grid dimensions differ".into()));
        }
        stale_check(ensemble.time(), psi.time())?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("trajectory step must be positive"));
        }
        let field = GuidanceField::new(psi, h)?.with_relative_node_threshold(node_threshold);
        Ok(TrajectoryIntegrator {
            h: h.clone(),
            dt,
            half: Propagator::new(psi, h, dt / 2.0)?,
            eighth: None,
            psi: psi.clone(),
            field,
            positions: ensemble.positions().to_vec(),
            dim: ensemble.dim(),
            frozen: vec![false; ensemble.member_count()],
            node_threshold,
        })
    }

    pub fn time(&self) -> f64 {
        self.psi.time()
    }

    pub fn wavefunction(&self) -> &WaveFunction {
        &self.psi
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn unresolved(&self) -> Vec<usize> {
        self.frozen.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| i).collect()
    }

    fn field(&self, psi: &WaveFunction) -> Result<GuidanceField> {
        Ok(GuidanceField::new(psi, &self.h)?.with_relative_node_threshold(self.node_threshold))
    }

    pub fn step(&mut self) -> Result<()> {
        let mut mid = self.psi.clone();
        self.half.step_checked(&mut mid)?;
        let mut end = mid.clone();
        self.half.step_checked(&mut end)?;
        let f_mid = self.field(&mid)?;
        let f_end = self.field(&end)?;
        let dim = self.dim;
        let grid = self.psi.grid().clone();
        let dt = self.dt;
        let f0 = &self.field;
        let results: Vec<Option<bool>> = self
            .positions
            .par_chunks_mut(dim)
            .zip(self.frozen.par_iter())
            .map(|(x, frozen)| {
                if *frozen {
                    return None;
                }
                match rk4(x, dt, f0, &f_mid, &f_mid, &f_end) {
                    Ok(new) => {
                        for a in 0..dim {
                            x[a] = grid.wrap(new[a]);
                        }
                        Some(true)
                    }
                    Err(_) => Some(false),
                }
            })
            .collect();
        let failed: Vec<usize> =
            results.iter().enumerate().filter(|(_, r)| **r == Some(false)).map(|(i, _)| i).collect();
        if !failed.is_empty() {
            self.retry(&failed)?;
        }
        self.psi = end;
        self.field = f_end;
        Ok(())
    }

    /// Quarter-step RK4 for members whose full step hit a node.
    fn retry(&mut self, failed: &[usize]) -> Result<()> {
        if self.eighth.is_none() {
            self.eighth = Some(Propagator::new(&self.psi, &self.h, self.dt / 8.0)?);
        }
        let prop = self.eighth.as_ref().expect("just built");
        let mut fields = vec![self.field.clone()];
        let mut psi = self.psi.clone();
        for _ in 0..8 {
            prop.step_checked(&mut psi)?;
            fields.push(GuidanceField::new(&psi, &self.h)?.with_relative_node_threshold(self.node_threshold));
        }
        let dim = self.dim;
        let q = self.dt / 4.0;
        for &m in failed {
            let mut x = [0.0; 2];
            x[..dim].copy_from_slice(&self.positions[m * dim..(m + 1) * dim]);
            let mut ok = true;
            for s in 0..4 {
                match rk4(&x[..dim], q, &fields[2 * s], &fields[2 * s + 1], &fields[2 * s + 1], &fields[2 * s + 2]) {
                    Ok(new) => {
                        for a in 0..dim {
                            x[a] = self.psi.grid().wrap(new[a]);
                        }
                    }
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.positions[m * dim..(m + 1) * dim].copy_from_slice(&x[..dim]);
            } else {
                self.frozen[m] = true;
            }
        }
        Ok(())
    }
}

fn rk4(
    x: &[f64],
    dt: f64,
    f0: &GuidanceField,
    f1: &GuidanceField,
    f2: &GuidanceField,
    f3: &GuidanceField,
) -> Result<[f64; 2]> {
    let d = x.len();
    let shift = |k: &[f64; 2], s: f64| {
        let mut y = [0.0; 2];
        for a in 0..d {
            y[a] = x[a] + s * k[a];
        }
        y
    };
    let k1 = f0.velocity(x)?;
    let k2 = f1.velocity(&shift(&k1, dt / 2.0)[..d])?;
    let k3 = f2.velocity(&shift(&k2, dt / 2.0)[..d])?;
    let k4 = f3.velocity(&shift(&k3, dt)[..d])?;
    let mut out = [0.0; 2];
    for a in 0..d {
        out[a] = x[a] + dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    }
    Ok(out)
}

pub(crate) fn stale_check(ensemble: f64, wavefunction: f64) -> Result<()> {
    if (ensemble - wavefunction).abs() > 1e-9 * ensemble.abs().max(1.0) {
        return Err(Error::Stale { ensemble, wavefunction });
    }
    Ok(())
}

/// Evolves `psi` and the ensemble together for `steps` RK4 steps of size `dt`.
pub fn integrate_trajectories(
    psi: &WaveFunction,
    h: &HamiltonianSpec,
    ensemble: &TrajectoryEnsemble,
    dt: f64,
    steps: usize,
    opts: &IntegrationOptions,
) -> Result<TrajectoryRun> {
    let mut integ = TrajectoryIntegrator::new(psi, h, ensemble, dt, opts.node_threshold)?;
    let mut out = ensemble.clone();
    let every = opts.record_every.max(1);
    for s in 1..=steps {
        integ.step()?;
        if s % every == 0 || s == steps {
            out.push_frame(integ.time(), integ.positions().to_vec())?;
        }
    }
    let unresolved = integ.unresolved();
    let mut warnings = Vec::new();
    let frac = unresolved.len() as f64 / ensemble.member_count() as f64;
    if frac > UNRESOLVED_WARNING_FRACTION {
        warnings.push(format!(
            "{} of {} members ({:.3}%) stayed at a node and were frozen",
            unresolved.len(),
            ensemble.member_count(),
            100.0 * frac
        ));
    }
    Ok(TrajectoryRun { ensemble: out, wavefunction: integ.psi, unresolved, warnings })
}
