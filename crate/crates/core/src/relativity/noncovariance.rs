use serde::{Deserialize, Serialize};

use super::boost::SoundBoost;
use crate::bohm::member_rng;
use crate::field::{integrate_field_trajectory, FieldConfiguration, GuidanceLaw, Wavefunctional};
use crate::lattice::{GaussianWavefunctional, LatticeModel, ModeBasis, ModeGaussian};
use crate::qm::interp::cubic_weights;
use crate::{Error, Result};

/// Where the S₀ Bohmian history starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum InitialConfiguration {
    /// The mean field: the maximum of `|Ψ₀|²`.
    BornPeak,
    /// One draw from `|Ψ₀|²`.
    BornSample { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoncovarianceOptions {
    /// Position of the event shared by both frames (at `t = t' = 0`).
    pub origin: f64,
    /// Half-width of the compared region in `x'`.
    pub window: f64,
    /// Compared slices span `t' ∈ [0, duration]`.
    pub duration: f64,
    pub slices: usize,
    pub dt: f64,
    pub initial: InitialConfiguration,
}

impl Default for NoncovarianceOptions {
    fn default() -> Self {
        NoncovarianceOptions {
            origin: 64.0,
            window: 16.0,
            duration: 10.0,
            slices: 10,
            dt: 0.01,
            initial: InitialConfiguration::BornSample { seed: 7 },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceMismatch {
    pub time: f64,
    pub trajectory: f64,
    pub prediction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoncovarianceReport {
    pub boost: SoundBoost,
    pub initial: InitialConfiguration,
    /// Largest `|φ_boosted S₀ history − φ_S' history|` over the compared
    /// events, divided by `field_scale`.
    pub trajectory_mismatch: f64,
    /// Same for the mean field `⟨φ⟩`, a measurable prediction.
    pub prediction_mismatch: f64,
    pub ratio: Option<f64>,
    pub field_scale: f64,
    pub events: usize,
    pub degenerate: bool,
    pub slices: Vec<SliceMismatch>,
    pub warnings: Vec<String>,
}

/// Coherent state on the ground-state widths with mean field `phi` and mean
/// field velocity `phidot` (site values).
pub fn coherent_from_mean_field(model: &LatticeModel, phi: &[f64], phidot: &[f64]) -> Result<GaussianWavefunctional> {
    let basis = ModeBasis::new(model);
    let centers = basis.to_modes(phi)?;
    let momenta = basis.to_modes(phidot)?;
    if model.has_zero_mode() {
        return Err(Error::Unsupported("mean-field states need a gapped model".into()));
    }
    let modes = model
        .dispersion()
        .into_iter()
        .enumerate()
        .map(|(k, w)| Some(ModeGaussian { center: centers[k], momentum: momenta[k], ..ModeGaussian::ground(w) }))
        .collect();
    GaussianWavefunctional::from_modes(model, modes, None)
}

/// Right-moving Gaussian wave packet `A e^{−(x−c)²/2σ²} cos k(x−c)` as a
/// coherent state.
pub fn wave_packet_state(model: &LatticeModel, amplitude: f64, width: f64, wavenumber: f64, center: f64) -> Result<GaussianWavefunctional> {
    if !(width > 0.0) {
        return Err(Error::invalid("packet width must be positive"));
    }
    let w = model.omega_at(wavenumber);
    let (phi, phidot): (Vec<f64>, Vec<f64>) = (0..model.sites())
        .map(|s| {
            let d = s as f64 * model.spacing() - center;
            let env = amplitude * (-d * d / (2.0 * width * width)).exp();
            let (sn, cs) = (wavenumber * d).sin_cos();
            (env * cs, env * w * sn)
        })
        .unzip();
    coherent_from_mean_field(model, &phi, &phidot)
}

fn is_ground_width(psi: &GaussianWavefunctional) -> bool {
    psi.modes().iter().flatten().all(|m| (m.width.re - m.omega).abs() <= 1e-12 * m.omega && m.width.im.abs() <= 1e-12 * m.omega)
}

fn is_stationary(psi: &GaussianWavefunctional) -> bool {
    is_ground_width(psi) && psi.modes().iter().flatten().all(|m| m.center == 0.0 && m.momentum == 0.0)
}

/// Mode-coordinate history on a uniform time grid.
struct History {
    t_start: f64,
    dt: f64,
    frames: Vec<Vec<f64>>,
}

impl History {
    fn at(&self, t: f64) -> Result<Vec<f64>> {
        let s = (t - self.t_start) / self.dt;
        let n = self.frames.len();
        if !(s >= 0.0 && s <= (n - 1) as f64) {
            return Err(Error::OutOfRange(format!("history does not cover t = {t}")));
        }
        let i = (s.floor() as usize).clamp(1, n.saturating_sub(3));
        let w = cubic_weights(s - i as f64);
        let dim = self.frames[0].len();
        Ok((0..dim).map(|k| (0..4).map(|m| w[m] * self.frames[i - 1 + m][k]).sum()).collect())
    }
}

/// Compares, on the `S'` slices `t' ∈ [0, duration]`, the boosted `S₀`
/// Bohmian field history with the history the same guidance law generates
/// in `S'` from the boosted data. The mean field is compared the same way as
/// the prediction-level reference.
pub fn trajectory_noncovariance_demo(
    psi: &GaussianWavefunctional,
    boost: &SoundBoost,
    opts: &NoncovarianceOptions,
) -> Result<NoncovarianceReport> {
    let model = psi.model();
    let cs = model.sound_speed();
    if (boost.sound_speed() - cs).abs() > 1e-9 * cs {
        return Err(Error::invalid(format!("boost uses c_s = {}, model has c_s = {cs}", boost.sound_speed())));
    }
    if model.has_zero_mode() {
        return Err(Error::Unsupported("noncovariance demo needs a gapped model".into()));
    }
    if !is_ground_width(psi) {
        return Err(Error::Unsupported("noncovariance demo handles coherent states (ground-state widths) only".into()));
    }
    if !(opts.dt > 0.0 && opts.duration > 0.0 && opts.slices > 0 && opts.window > 0.0) {
        return Err(Error::invalid("dt, duration, slices and window must be positive"));
    }
    let mut warnings = Vec::new();
    let degenerate = is_stationary(psi);
    let initial = if degenerate {
        warnings.push(
            "stationary state: both histories are static; compared from the peak configuration, so the mismatch is zero".into(),
        );
        InitialConfiguration::BornPeak
    } else {
        opts.initial
    };

    let n = model.sites();
    let a = model.spacing();
    let basis = ModeBasis::new(model);
    let (g, v, c2, x0) = (boost.gamma(), boost.velocity(), cs * cs, opts.origin);
    let to_s0 = |xp: f64, tp: f64| (x0 + g * ((xp - x0) + v * tp), g * (tp + v * (xp - x0) / c2));

    let per_slice = ((opts.duration / opts.slices as f64) / opts.dt).round().max(1.0) as usize;
    let dt = opts.duration / (opts.slices * per_slice) as f64;
    let slice_times: Vec<f64> = (0..=opts.slices).map(|j| (j * per_slice) as f64 * dt).collect();
    let sites: Vec<f64> = (0..n).map(|s| s as f64 * a).collect();
    let window: Vec<usize> = (0..n).filter(|&s| (sites[s] - x0).abs() <= opts.window).collect();
    if window.is_empty() {
        return Err(Error::invalid("comparison window contains no sites"));
    }

    let mut needed: Vec<f64> = sites.iter().map(|&x| to_s0(x, 0.0).1).collect();
    for &tp in &slice_times {
        needed.extend(window.iter().map(|&s| to_s0(sites[s], tp).1));
    }
    let t_lo = needed.iter().cloned().fold(0.0, f64::min);
    let t_hi = needed.iter().cloned().fold(0.0, f64::max);
    let back = ((-t_lo) / dt).ceil() as usize + 2;
    let fwd = (t_hi / dt).ceil() as usize + 2;

    let t0 = psi.time();
    let wf = Wavefunctional::from(psi.clone());
    let q0 = match initial {
        InitialConfiguration::BornPeak => psi.modes().iter().map(|m| m.map_or(0.0, |m| m.center)).collect(),
        InitialConfiguration::BornSample { seed } => psi.sample_modes(&mut member_rng(seed, 0)),
    };
    let phi0 = FieldConfiguration::new(basis.to_sites(&q0)?, t0)?;
    let forward = integrate_field_trajectory(&wf, &phi0, dt, fwd, GuidanceLaw::Standard, 1)?;
    let backward = integrate_field_trajectory(&wf, &phi0, -dt, back, GuidanceLaw::Standard, 1)?;
    let mut frames = Vec::with_capacity(back + fwd + 1);
    for f in backward.frames.iter().skip(1).rev().chain(&forward.frames) {
        frames.push(basis.to_modes(f)?);
    }
    let history = History { t_start: -(back as f64) * dt, dt, frames };

    let history_at = |x: f64, t: f64| -> Result<f64> { Ok(basis.field_at(&history.at(t)?, x / a).0) };
    // Mean field and its x and t derivatives at an S₀ event.
    let mean_at = |x: f64, t: f64| -> Result<(f64, f64, f64)> {
        let s = psi.at_time(t0 + t)?;
        let c: Vec<f64> = s.modes().iter().map(|m| m.map_or(0.0, |m| m.center)).collect();
        let p: Vec<f64> = s.modes().iter().map(|m| m.map_or(0.0, |m| m.momentum)).collect();
        let (f, du) = basis.field_at(&c, x / a);
        Ok((f, du / a, basis.field_at(&p, x / a).0))
    };

    // S′ data on the slice t′ = 0.
    let mut phi_p = Vec::with_capacity(n);
    let mut pi_p = Vec::with_capacity(n);
    let mut config_p = Vec::with_capacity(n);
    for &xp in &sites {
        let (x, t) = to_s0(xp, 0.0);
        let (f, fx, ft) = mean_at(x, t)?;
        phi_p.push(f);
        pi_p.push(g * (ft + v * fx));
        config_p.push(history_at(x, t)?);
    }
    let psi_p = coherent_from_mean_field(model, &phi_p, &pi_p)?;
    let wf_p = Wavefunctional::from(psi_p.clone());
    let run_p = integrate_field_trajectory(
        &wf_p,
        &FieldConfiguration::new(config_p, 0.0)?,
        dt,
        opts.slices * per_slice,
        GuidanceLaw::Standard,
        per_slice,
    )?;

    let scale = window.iter().map(|&s| phi_p[s].abs()).fold(0.0, f64::max);
    let field_scale = if scale > 0.0 { scale } else { 1.0 };
    let mut slices = Vec::with_capacity(slice_times.len());
    for (j, &tp) in slice_times.iter().enumerate() {
        let mean_p = psi_p.at_time(tp)?.mean_field()?;
        let (mut traj, mut pred) = (0.0f64, 0.0f64);
        for &s in &window {
            let (x, t) = to_s0(sites[s], tp);
            traj = traj.max((history_at(x, t)? - run_p.frames[j][s]).abs());
            pred = pred.max((mean_at(x, t)?.0 - mean_p[s]).abs());
        }
        slices.push(SliceMismatch { time: tp, trajectory: traj / field_scale, prediction: pred / field_scale });
    }
    let trajectory_mismatch = slices.iter().map(|s| s.trajectory).fold(0.0, f64::max);
    let prediction_mismatch = slices.iter().map(|s| s.prediction).fold(0.0, f64::max);
    Ok(NoncovarianceReport {
        boost: *boost,
        initial,
        trajectory_mismatch,
        prediction_mismatch,
        ratio: (prediction_mismatch > 0.0).then(|| trajectory_mismatch / prediction_mismatch),
        field_scale,
        events: window.len() * slice_times.len(),
        degenerate,
        slices,
        warnings,
    })
}
