use std::io::Write;

use super::guidance::{FieldConfiguration, GuidanceLaw, FIELD_NODE_THRESHOLD};
use super::wavefunctional::Wavefunctional;
use crate::lattice::ModeBasis;
use crate::{Error, Result};

/// Recorded field trajectory: site values per frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldTrajectory {
    pub times: Vec<f64>,
    pub frames: Vec<Vec<f64>>,
}

impl FieldTrajectory {
    pub fn last(&self) -> FieldConfiguration {
        FieldConfiguration { values: self.frames.last().expect("trajectory has a frame").clone(), time: *self.times.last().expect("trajectory has a frame") }
    }

    /// Columns `time,member,site,value` with a fixed member index.
    pub fn write_rows<W: Write>(&self, w: &mut csv::Writer<W>, member: usize) -> Result<()> {
        for (t, f) in self.times.iter().zip(&self.frames) {
            for (x, v) in f.iter().enumerate() {
                w.write_record([t.to_string(), member.to_string(), x.to_string(), v.to_string()])?;
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "member", "site", "value"])?;
        self.write_rows(&mut w, 0)?;
        w.flush()?;
        Ok(())
    }
}

/// Mode-space RK4 integrator. `Ψ` is evaluated in closed form at every stage
/// time, so the only error is the RK4 truncation of the guidance flow.
pub(crate) struct ModeStepper<'a> {
    pub psi: &'a Wavefunctional,
    pub law: GuidanceLaw,
}

impl ModeStepper<'_> {
    pub fn rk4(&self, t: f64, q: &[f64], dt: f64) -> Result<Vec<f64>> {
        let [a, b, c] = [self.psi.at_time(t)?, self.psi.at_time(t + dt / 2.0)?, self.psi.at_time(t + dt)?];
        rk4_with(self.law, [&a, &b, &c], q, dt)
    }

    /// One step with a four-substep retry near nodes.
    pub fn step(&self, t: f64, q: &[f64], dt: f64) -> Result<Vec<f64>> {
        match self.rk4(t, q, dt) {
            Err(Error::NodeProximity { .. }) => {
                let mut x = q.to_vec();
                for s in 0..4 {
                    x = self.rk4(t + s as f64 * dt / 4.0, &x, dt / 4.0)?;
                }
                Ok(x)
            }
            other => other,
        }
    }
}

fn law_velocity(law: GuidanceLaw, psi: &Wavefunctional, q: &[f64]) -> Result<Vec<f64>> {
    let mut v = psi.mode_velocity(q, FIELD_NODE_THRESHOLD)?;
    let s = law.sign();
    v.iter_mut().for_each(|x| *x *= s);
    Ok(v)
}

/// RK4 step given `Ψ` at the start, midpoint and end of the step.
fn rk4_with(law: GuidanceLaw, psi: [&Wavefunctional; 3], q: &[f64], dt: f64) -> Result<Vec<f64>> {
    let add = |a: &[f64], k: &[f64], s: f64| a.iter().zip(k).map(|(x, v)| x + s * v).collect::<Vec<_>>();
    let k1 = law_velocity(law, psi[0], q)?;
    let k2 = law_velocity(law, psi[1], &add(q, &k1, dt / 2.0))?;
    let k3 = law_velocity(law, psi[1], &add(q, &k2, dt / 2.0))?;
    let k4 = law_velocity(law, psi[2], &add(q, &k3, dt))?;
    Ok(q.iter()
        .enumerate()
        .map(|(i, x)| x + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Fixed time grid shared by many members: `Ψ` is evaluated once per
/// half step instead of once per member and stage.
pub(crate) struct SnapshotStepper<'a> {
    inner: ModeStepper<'a>,
    t0: f64,
    dt: f64,
    snapshots: Vec<Wavefunctional>,
}

impl<'a> SnapshotStepper<'a> {
    pub fn new(psi: &'a Wavefunctional, law: GuidanceLaw, t0: f64, dt: f64, steps: usize) -> Result<Self> {
        let snapshots = (0..=2 * steps).map(|h| psi.at_time(t0 + h as f64 * dt / 2.0)).collect::<Result<_>>()?;
        Ok(SnapshotStepper { inner: ModeStepper { psi, law }, t0, dt, snapshots })
    }

    /// Step `s` (from `t0 + s·dt`), with the node retry of [`ModeStepper::step`].
    pub fn step(&self, s: usize, q: &[f64]) -> Result<Vec<f64>> {
        let snaps = [&self.snapshots[2 * s], &self.snapshots[2 * s + 1], &self.snapshots[2 * s + 2]];
        match rk4_with(self.inner.law, snaps, q, self.dt) {
            Err(Error::NodeProximity { .. }) => self.inner.step(self.t0 + s as f64 * self.dt, q, self.dt),
            other => other,
        }
    }
}

/// Integrates `Φ̇ = guidance(Ψ(t), Φ)` from `phi0` for `steps` steps of `dt`
/// (negative `dt` runs backwards).
pub fn integrate_field_trajectory(
    psi: &Wavefunctional,
    phi0: &FieldConfiguration,
    dt: f64,
    steps: usize,
    law: GuidanceLaw,
    record_every: usize,
) -> Result<FieldTrajectory> {
    if !(dt != 0.0 && dt.is_finite()) {
        return Err(Error::invalid("field step must be finite and nonzero"));
    }
    let basis = ModeBasis::new(psi.model());
    let mut q = basis.to_modes(&phi0.values)?;
    let stepper = ModeStepper { psi, law };
    let mut traj = FieldTrajectory { times: vec![phi0.time], frames: vec![phi0.values.clone()] };
    let every = record_every.max(1);
    for s in 1..=steps {
        let t = phi0.time + (s - 1) as f64 * dt;
        q = stepper.step(t, &q, dt)?;
        if s % every == 0 || s == steps {
            traj.times.push(phi0.time + s as f64 * dt);
            traj.frames.push(basis.to_sites(&q)?);
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{GaussianWavefunctional, LatticeModel};
    use num_complex::Complex64;

    #[test]
    fn ground_state_trajectory_is_static() {
        let m = LatticeModel::scalar_field(6, 1.0, 0.5).unwrap();
        let psi = Wavefunctional::from(GaussianWavefunctional::ground(&m));
        let phi = FieldConfiguration::new(vec![0.3, -0.1, 0.2, 0.7, -0.4, 0.0], 0.0).unwrap();
        let tr = integrate_field_trajectory(&psi, &phi, 0.05, 100, GuidanceLaw::Standard, 10).unwrap();
        for f in &tr.frames {
            for (a, b) in f.iter().zip(&phi.values) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coherent_trajectory_tracks_shifted_center() {
        let m = LatticeModel::scalar_field(8, 1.0, 0.5).unwrap();
        let g = GaussianWavefunctional::coherent(&m, &[(1, Complex64::new(1.0, 0.5)), (6, Complex64::new(0.0, -0.8))]).unwrap();
        let psi = Wavefunctional::from(g.clone());
        let basis = ModeBasis::new(&m);
        let q0 = vec![0.2, 1.1, -0.3, 0.05, 0.4, -0.6, 0.1, 0.0];
        let phi0 = FieldConfiguration::new(basis.to_sites(&q0).unwrap(), 0.0).unwrap();
        let w_min = m.dispersion().into_iter().fold(f64::INFINITY, f64::min);
        let t_end = 10.0 / w_min;
        let steps = 2000;
        let tr = integrate_field_trajectory(&psi, &phi0, t_end / steps as f64, steps, GuidanceLaw::Standard, 100).unwrap();
        for (t, f) in tr.times.iter().zip(&tr.frames) {
            let q = basis.to_modes(f).unwrap();
            let gt = g.at_time(*t).unwrap();
            for k in 0..8 {
                let (c0, ct) = (g.mode(k).unwrap().center, gt.mode(k).unwrap().center);
                assert!((q[k] - (q0[k] - c0 + ct)).abs() < 1e-6, "t={t} k={k}");
            }
        }
    }
}
