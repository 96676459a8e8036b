use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::LatticeModel;
use crate::{Error, Result};

/// Spacetime point `(x, t)`; `x` is continuous (in units of length).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub x: f64,
    pub t: f64,
}

impl Event {
    pub fn new(x: f64, t: f64) -> Self {
        Event { x, t }
    }
}

/// Vacuum Wightman function `⟨0|φ(x,t) φ(x',t')|0⟩`,
/// `W = Σ_k ħ/(2Nμω_k) e^{i(k(x−x') − ω_k(t−t'))}`.
///
/// The sum runs over the first Brillouin zone; at even `N` the zone-edge
/// term uses `cos(kΔx)` so that off-lattice separations interpolate a real
/// field. A zero-frequency mode makes `W` diverge; it must be dropped
/// explicitly with `exclude_zero_mode`.
pub fn two_point_function(model: &LatticeModel, e1: Event, e2: Event, exclude_zero_mode: bool) -> Result<Complex64> {
    let n = model.sites();
    let dx = e1.x - e2.x;
    let dt = e1.t - e2.t;
    let pref = model.hbar() / (2.0 * n as f64 * model.inertia());
    let mut w = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let omega = model.omega(j);
        if omega == 0.0 {
            if exclude_zero_mode {
                continue;
            }
            return Err(Error::ZeroMode);
        }
        let time = Complex64::from_polar(1.0, -omega * dt);
        let space = if 2 * j == n {
            Complex64::new((model.wavenumber(j) * dx).cos(), 0.0)
        } else {
            Complex64::from_polar(1.0, model.signed_wavenumber(j) * dx)
        };
        w += pref / omega * space * time;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coincident_value_is_real_positive() {
        let m = LatticeModel::scalar_field(32, 0.5, 0.3).unwrap();
        let w = two_point_function(&m, Event::new(1.0, 2.0), Event::new(1.0, 2.0), false).unwrap();
        let expect: f64 = m.dispersion().iter().map(|o| 1.0 / (2.0 * 32.0 * 0.5 * o)).sum();
        assert!(w.im.abs() < 1e-15 && (w.re - expect).abs() < 1e-14);
    }

    #[test]
    fn parity_symmetry() {
        let m = LatticeModel::scalar_field(31, 1.0, 0.2).unwrap();
        for d in [1.0, 2.5, 7.0] {
            let a = two_point_function(&m, Event::new(d, 0.0), Event::new(0.0, 0.0), false).unwrap();
            let b = two_point_function(&m, Event::new(-d, 0.0), Event::new(0.0, 0.0), false).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_mode_must_be_excluded() {
        let m = LatticeModel::atom_chain(8, 1.0, 1.0, 1.0).unwrap();
        let (a, b) = (Event::new(0.0, 0.0), Event::new(2.0, 0.0));
        assert!(matches!(two_point_function(&m, a, b, false), Err(Error::ZeroMode)));
        assert!(two_point_function(&m, a, b, true).is_ok());
    }
}
