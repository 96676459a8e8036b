use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::qm::WaveFunction;
use crate::{Error, Result};

/// Per-member RNG: one ChaCha stream per member index, so results do not
/// depend on thread scheduling.
pub(crate) fn member_rng(seed: u64, member: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member);
    rng
}

/// Positions of `M` configurations in a `d`-dimensional configuration space,
/// recorded at a sequence of strictly increasing times.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryEnsemble {
    dim: usize,
    members: usize,
    seed: Option<u64>,
    times: Vec<f64>,
    /// One frame per time, member-major (`members × dim`).
    frames: Vec<Vec<f64>>,
}

impl TrajectoryEnsemble {
    pub fn new(dim: usize, positions: Vec<f64>, time: f64, seed: Option<u64>) -> Result<Self> {
        if dim == 0 || positions.is_empty() || positions.len() % dim != 0 {
            return Err(Error::Shape(format!("{} coordinates do not form {dim}D members", positions.len())));
        }
        if positions.iter().any(|x| !x.is_finite()) || !time.is_finite() {
            return Err(Error::invalid("ensemble positions and time must be finite"));
        }
        Ok(TrajectoryEnsemble {
            dim,
            members: positions.len() / dim,
            seed,
            times: vec![time],
            frames: vec![positions],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn member_count(&self) -> usize {
        self.members
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Time of the latest frame.
    pub fn time(&self) -> f64 {
        *self.times.last().expect("ensemble has a frame")
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Positions at the latest frame.
    pub fn positions(&self) -> &[f64] {
        self.frames.last().expect("ensemble has a frame")
    }

    pub fn frame(&self, i: usize) -> &[f64] {
        &self.frames[i]
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    /// Coordinate `axis` of every member at the latest frame.
    pub fn coordinates(&self, axis: usize) -> Vec<f64> {
        self.positions().chunks(self.dim).map(|p| p[axis]).collect()
    }

    pub fn push_frame(&mut self, time: f64, positions: Vec<f64>) -> Result<()> {
        if positions.len() != self.members * self.dim {
            return Err(Error::Shape("frame size does not match the ensemble".into()));
        }
        if !(time > self.time()) {
            return Err(Error::invalid("frame times must increase strictly"));
        }
        self.times.push(time);
        self.frames.push(positions);
        Ok(())
    }

    /// Keeps only the latest frame.
    pub fn latest_only(mut self) -> Self {
        let t = self.time();
        let f = self.frames.pop().expect("ensemble has a frame");
        self.times = vec![t];
        self.frames = vec![f];
        self
    }

    /// Columns `time,member,x[,y]`, one row per member per frame.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["time".to_string(), "member".to_string()];
        header.extend(["x", "y"].iter().take(self.dim).map(|s| s.to_string()));
        w.write_record(&header)?;
        for (t, frame) in self.times.iter().zip(&self.frames) {
            for (m, p) in frame.chunks(self.dim).enumerate() {
                let mut row = vec![t.to_string(), m.to_string()];
                row.extend(p.iter().map(|x| x.to_string()));
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Draws `members` configurations from `|ψ|²`: a grid cell is chosen with
/// probability `|ψ|² dV`, then the position is spread uniformly over the cell.
pub fn sample_born(psi: &WaveFunction, members: usize, seed: u64) -> Result<TrajectoryEnsemble> {
    if members == 0 {
        return Err(Error::invalid("ensemble needs at least one member"));
    }
    let grid = psi.grid();
    let density = psi.density();
    let total: f64 = density.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::NonNormalizable(total, 0));
    }
    let mut cdf = Vec::with_capacity(density.len());
    let mut acc = 0.0;
    for d in &density {
        acc += d / total;
        cdf.push(acc);
    }
    let dim = grid.dim();
    let dx = grid.spacing();
    let positions: Vec<f64> = (0..members)
        .into_par_iter()
        .flat_map_iter(|m| {
            let mut rng = member_rng(seed, m as u64);
            let u: f64 = rng.random();
            let cell = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
            let pt = grid.point(cell);
            (0..dim).map(move |a| pt[a] + (rng.random::<f64>() - 0.5) * dx).collect::<Vec<_>>()
        })
        .collect();
    TrajectoryEnsemble::new(dim, positions, psi.time(), Some(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qm::{Boundary, SpatialGrid};
    use num_complex::Complex64;

    fn gaussian() -> WaveFunction {
        let g = SpatialGrid::new(1, 128, 0.1, Boundary::Periodic).unwrap();
        WaveFunction::from_fn(g, |x, _| Complex64::new((-x * x / 2.0).exp(), 0.0)).unwrap()
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let psi = gaussian();
        let a = sample_born(&psi, 500, 7).unwrap();
        let b = sample_born(&psi, 500, 7).unwrap();
        let c = sample_born(&psi, 500, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.positions(), c.positions());
    }

    #[test]
    fn sample_moments_match_gaussian() {
        let psi = gaussian();
        let e = sample_born(&psi, 20000, 3).unwrap();
        let xs = e.coordinates(0);
        let m = crate::stats::mean(&xs);
        let v = crate::stats::variance(&xs);
        assert!(m.abs() < 0.03, "{m}");
        // |ψ|² has variance 1/2; cell jitter adds dx²/12.
        assert!((v - 0.5 - 0.01 / 12.0).abs() < 0.03, "{v}");
    }

    #[test]
    fn frames_must_advance() {
        let mut e = TrajectoryEnsemble::new(1, vec![0.0, 1.0], 0.0, None).unwrap();
        assert!(e.push_frame(0.0, vec![0.0, 1.0]).is_err());
        assert!(e.push_frame(0.5, vec![0.0]).is_err());
        e.push_frame(0.5, vec![0.1, 1.1]).unwrap();
        assert_eq!(e.time(), 0.5);
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }
}
