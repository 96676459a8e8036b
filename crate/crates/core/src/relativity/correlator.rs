use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::boost::SoundBoost;
use crate::lattice::{two_point_function, Event, LatticeModel};
use crate::{Error, Result};

/// Pairs must be at least this many spacings apart, in both frames.
pub const MIN_SEPARATION_SPACINGS: f64 = 8.0;
/// Pairs must be at most this fraction of the ring length apart.
pub const MAX_SEPARATION_FRACTION: f64 = 0.25;
/// Largest accepted `|v|/c_s`.
pub const MAX_BOOST_BETA: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventPair {
    pub first: Event,
    pub second: Event,
}

impl EventPair {
    pub fn new(first: Event, second: Event) -> Self {
        EventPair { first, second }
    }

    /// Equal-time pair at `x` and `x + separation`.
    pub fn equal_time(x: f64, separation: f64) -> Self {
        EventPair { first: Event::new(x, 0.0), second: Event::new(x + separation, 0.0) }
    }

    fn boosted(&self, b: &SoundBoost) -> EventPair {
        EventPair { first: b.apply(self.first), second: b.apply(self.second) }
    }

    fn separation(&self) -> f64 {
        (self.first.x - self.second.x).abs()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairComparison {
    pub original: EventPair,
    pub boosted: EventPair,
    pub w_original: Complex64,
    pub w_boosted: Complex64,
    pub relative_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoostReport {
    pub boost: SoundBoost,
    pub sites: usize,
    pub spacing: f64,
    pub max_relative_deviation: f64,
    pub pairs: Vec<PairComparison>,
}

fn check_window(model: &LatticeModel, pair: &EventPair) -> Result<()> {
    let d = pair.separation();
    let (lo, hi) = (MIN_SEPARATION_SPACINGS * model.spacing(), MAX_SEPARATION_FRACTION * model.length());
    if d < lo || d > hi {
        return Err(Error::OutOfRange(format!(
            "pair separation {d:.4} outside [{lo:.4}, {hi:.4}] ({MIN_SEPARATION_SPACINGS} spacings to {MAX_SEPARATION_FRACTION} of the ring)"
        )));
    }
    Ok(())
}

/// Compares the vacuum two-point function on each pair with its value on
/// the boosted pair. A zero-frequency mode is left out of the sum.
pub fn boost_invariance_correlator(model: &LatticeModel, pairs: &[EventPair], boost: &SoundBoost) -> Result<BoostReport> {
    let cs = model.sound_speed();
    if (boost.sound_speed() - cs).abs() > 1e-9 * cs {
        return Err(Error::invalid(format!("boost uses c_s = {}, model has c_s = {cs}", boost.sound_speed())));
    }
    if boost.beta().abs() > MAX_BOOST_BETA {
        return Err(Error::OutOfRange(format!("|v|/c_s = {:.3} exceeds {MAX_BOOST_BETA}", boost.beta().abs())));
    }
    if pairs.is_empty() {
        return Err(Error::invalid("no event pairs given"));
    }
    let mut rows = Vec::with_capacity(pairs.len());
    for p in pairs {
        let q = p.boosted(boost);
        check_window(model, p)?;
        check_window(model, &q)?;
        let w0 = two_point_function(model, p.first, p.second, true)?;
        let w1 = two_point_function(model, q.first, q.second, true)?;
        rows.push(PairComparison {
            original: *p,
            boosted: q,
            w_original: w0,
            w_boosted: w1,
            relative_deviation: (w1 - w0).norm() / w0.norm(),
        });
    }
    Ok(BoostReport {
        boost: *boost,
        sites: model.sites(),
        spacing: model.spacing(),
        max_relative_deviation: rows.iter().map(|r| r.relative_deviation).fold(0.0, f64::max),
        pairs: rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementStep {
    pub sites: usize,
    pub spacing: f64,
    pub max_relative_deviation: f64,
}

/// Repeats [`boost_invariance_correlator`] at fixed ring length for each
/// site count in `sites`.
pub fn correlator_refinement(model: &LatticeModel, pairs: &[EventPair], boost: &SoundBoost, sites: &[usize]) -> Result<Vec<RefinementStep>> {
    sites
        .iter()
        .map(|&n| {
            let m = model.resized(n, model.length() / n as f64)?;
            let b = SoundBoost::new(boost.velocity(), m.sound_speed())?;
            let r = boost_invariance_correlator(&m, pairs, &b)?;
            Ok(RefinementStep { sites: n, spacing: m.spacing(), max_relative_deviation: r.max_relative_deviation })
        })
        .collect()
}

/// Strictly decreasing deviations along a refinement sequence.
pub fn strictly_decreasing(steps: &[RefinementStep]) -> bool {
    steps.windows(2).all(|w| w[1].max_relative_deviation < w[0].max_relative_deviation)
}
