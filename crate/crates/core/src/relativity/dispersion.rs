use serde::Serialize;

use crate::lattice::{LatticeKind, LatticeModel};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct DispersionPoint {
    pub k: f64,
    pub omega: f64,
    /// `ω_k / (c_s k)`.
    pub ratio: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DispersionScan {
    pub k_cut: f64,
    /// Largest `|ω_k/(c_s k) − 1|` for `0 < k ≤ k_cut`.
    pub max_deviation: f64,
    /// Deviation never decreases with `k` over the whole zone.
    pub monotone: bool,
    /// Every positive lattice wavenumber up to the zone edge.
    pub profile: Vec<DispersionPoint>,
}

impl DispersionScan {
    /// Columns `k,omega,ratio,deviation`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.profile {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Compares the lattice dispersion with the sound cone `ω = c_s k`.
pub fn dispersion_linearity_scan(model: &LatticeModel, k_cut: f64) -> Result<DispersionScan> {
    let gapless = match model.kind() {
        LatticeKind::AtomChain { pinning, .. } => pinning == 0.0,
        LatticeKind::ScalarField { mass } => mass == 0.0,
    };
    if !gapless {
        return Err(Error::invalid("linearity scan needs a gapless model (no pinning, zero field mass)"));
    }
    if !(k_cut > 0.0) {
        return Err(Error::invalid("k_cut must be positive"));
    }
    let cs = model.sound_speed();
    let n = model.sites();
    let profile: Vec<DispersionPoint> = (1..=n / 2)
        .map(|j| {
            let k = model.wavenumber(j);
            let omega = model.omega_at(k);
            let ratio = omega / (cs * k);
            DispersionPoint { k, omega, ratio, deviation: (ratio - 1.0).abs() }
        })
        .collect();
    let max_deviation = profile.iter().filter(|p| p.k <= k_cut * (1.0 + 1e-12)).map(|p| p.deviation).fold(0.0, f64::max);
    let monotone = profile.windows(2).all(|w| w[1].deviation >= w[0].deviation);
    Ok(DispersionScan { k_cut, max_deviation, monotone, profile })
}
