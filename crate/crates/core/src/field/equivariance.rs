use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::guidance::GuidanceLaw;
use super::integrate::SnapshotStepper;
use super::wavefunctional::Wavefunctional;
use crate::bohm::member_rng;
use crate::lattice::GaussianWavefunctional;
use crate::stats::{histogram, normal_cdf};
use crate::{Error, Result};

/// How the initial ensemble is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialEnsemble {
    /// Independent normals per mode from `|Ψ₀|²`.
    #[default]
    Born,
    /// Every member at `q = 0`; a negative control.
    AllZero,
}

#[derive(Clone, Debug)]
pub struct FieldEquivarianceOptions {
    pub members: usize,
    pub seed: u64,
    pub time: f64,
    pub steps: usize,
    pub law: GuidanceLaw,
    pub initial: InitialEnsemble,
    pub bins: usize,
}

impl Default for FieldEquivarianceOptions {
    fn default() -> Self {
        FieldEquivarianceOptions {
            members: 10_000,
            seed: 1,
            time: 1.0,
            steps: 100,
            law: GuidanceLaw::Standard,
            initial: InitialEnsemble::Born,
            bins: 64,
        }
    }
}

/// Empirical vs expected moments of one mode coordinate at the final time.
#[derive(Clone, Debug, Serialize)]
pub struct ModeMoments {
    pub mode: usize,
    pub mean: f64,
    pub expected_mean: f64,
    /// `|mean − expected| / √(var/M)`.
    pub mean_z: f64,
    pub variance: f64,
    pub expected_variance: f64,
    /// `|var − expected| / expected`.
    pub variance_error: f64,
    /// Histogram L1 against the Gaussian marginal over `mean ± 5σ`.
    pub l1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldEquivarianceReport {
    pub members: usize,
    pub time: f64,
    pub modes: Vec<ModeMoments>,
    /// Bound on `variance_error`: `3√(2/M)`.
    pub variance_bound: f64,
    /// Bound on `mean_z`.
    pub mean_bound: f64,
    pub passed: bool,
    pub unresolved: usize,
    pub warnings: Vec<String>,
}

impl FieldEquivarianceReport {
    /// Columns `mode,mean,expected_mean,mean_z,variance,expected_variance,variance_error,l1`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for m in &self.modes {
            w.serialize(m)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Samples `M` configurations from `|Ψ₀|²` in mode space, moves each along
/// its Bohmian trajectory to time `t`, and compares per-mode moments with
/// those of `|Ψ(t)|²`.
pub fn field_equivariance(psi: &GaussianWavefunctional, opts: &FieldEquivarianceOptions) -> Result<FieldEquivarianceReport> {
    if opts.members < 2 || opts.steps == 0 {
        return Err(Error::invalid("field equivariance needs at least two members and one step"));
    }
    let wf = Wavefunctional::from(psi.clone());
    let dt = opts.time / opts.steps as f64;
    let n = psi.model().sites();
    let t0 = psi.time();
    let stepper = SnapshotStepper::new(&wf, opts.law, t0, dt, opts.steps)?;
    let results: Vec<Option<Vec<f64>>> = (0..opts.members)
        .into_par_iter()
        .map(|m| {
            let mut q = match opts.initial {
                InitialEnsemble::Born => psi.sample_modes(&mut member_rng(opts.seed, m as u64)),
                InitialEnsemble::AllZero => vec![0.0; n],
            };
            for s in 0..opts.steps {
                q = stepper.step(s, &q).ok()?;
            }
            Some(q)
        })
        .collect();
    let finals: Vec<&Vec<f64>> = results.iter().flatten().collect();
    let unresolved = opts.members - finals.len();
    let mut warnings = Vec::new();
    if unresolved as f64 > crate::bohm::UNRESOLVED_WARNING_FRACTION * opts.members as f64 {
        warnings.push(format!("{unresolved} of {} field members were stopped at nodes", opts.members));
    }
    if finals.len() < 2 {
        return Err(Error::invalid("too few resolved members to compute moments"));
    }
    let target = psi.at_time(t0 + opts.time)?;
    let expected = target.moments();
    let mf = finals.len() as f64;
    let variance_bound = 3.0 * (2.0 / mf).sqrt();
    let mean_bound = 3.0;
    let mut modes = Vec::new();
    for k in 0..n {
        let xs: Vec<f64> = finals.iter().map(|q| q[k]).collect();
        let (em, ev) = expected[k];
        if ev == 0.0 {
            // Classical zero mode: nothing random to compare.
            continue;
        }
        let mean = crate::stats::mean(&xs);
        let variance = crate::stats::variance(&xs);
        let sd = ev.sqrt();
        let (lo, hi) = (em - 5.0 * sd, em + 5.0 * sd);
        let counts = histogram(&xs, lo, hi, opts.bins);
        let w = (hi - lo) / opts.bins as f64;
        let l1 = counts
            .iter()
            .enumerate()
            .map(|(b, &c)| {
                let a = lo + b as f64 * w;
                let p = normal_cdf((a + w - em) / sd) - normal_cdf((a - em) / sd);
                (c as f64 / mf - p).abs()
            })
            .sum();
        modes.push(ModeMoments {
            mode: k,
            mean,
            expected_mean: em,
            mean_z: (mean - em).abs() / (ev / mf).sqrt(),
            variance,
            expected_variance: ev,
            variance_error: (variance - ev).abs() / ev,
            l1,
        });
    }
    let passed = modes.iter().all(|m| m.mean_z < mean_bound && m.variance_error < variance_bound);
    Ok(FieldEquivarianceReport {
        members: finals.len(),
        time: t0 + opts.time,
        modes,
        variance_bound,
        mean_bound,
        passed,
        unresolved,
        warnings,
    })
}
