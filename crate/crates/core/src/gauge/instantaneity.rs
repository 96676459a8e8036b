use serde::Serialize;

use super::grid::{GaugeGrid, ScalarField, Spectral};
use super::potential::{coulomb_kernel_sum, solve_scalar_potential, PoissonMode};
use crate::{Error, Result};

/// Response of the Coulomb-gauge `φ` at a probe site to a source history.
#[derive(Clone, Debug, Serialize)]
pub struct InstantaneityReport {
    pub times: Vec<f64>,
    pub probe: [usize; 3],
    pub probe_distance: f64,
    pub probe_potential: Vec<f64>,
    /// First snapshot at which `ρ` differs from its predecessor.
    pub source_change_time: Option<f64>,
    /// First snapshot at which `φ(probe)` differs from its predecessor.
    pub response_time: Option<f64>,
    pub simultaneous: bool,
    /// `φ(probe)` jump at the source change.
    pub delta_phi: f64,
    /// Direct kernel sum of the charge change at the probe.
    pub kernel_prediction: f64,
    pub prediction_error: f64,
    pub note: String,
}

/// Solves for `φ` (free-space kernel) at each snapshot of `rho` and records
/// when the probe potential first moves.
pub fn instantaneity_demo(grid: GaugeGrid, rho: &[ScalarField], dt: f64, probe: [usize; 3]) -> Result<InstantaneityReport> {
    if rho.is_empty() {
        return Err(Error::invalid("instantaneity demo needs at least one source snapshot"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("snapshot spacing must be positive"));
    }
    if probe.iter().any(|&i| i >= grid.points()) {
        return Err(Error::OutOfRange(format!("probe {probe:?} outside a {}³ grid", grid.points())));
    }
    let spec = Spectral::new(grid);
    let p = grid.index(probe);
    let probe_potential = rho
        .iter()
        .map(|r| solve_scalar_potential(&spec, r, PoissonMode::Isolated).map(|phi| phi[p]))
        .collect::<Result<Vec<f64>>>()?;
    let times: Vec<f64> = (0..rho.len()).map(|i| i as f64 * dt).collect();
    let step = (1..rho.len()).find(|&i| rho[i] != rho[i - 1]);
    // Round-off floor of the padded FFT solve relative to the potential scale.
    let scale = probe_potential.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let response = (1..rho.len()).find(|&i| (probe_potential[i] - probe_potential[i - 1]).abs() > floor);
    let (delta_phi, kernel_prediction) = match step {
        Some(i) => {
            let change: Vec<f64> = rho[i].iter().zip(&rho[i - 1]).map(|(a, b)| a - b).collect();
            (probe_potential[i] - probe_potential[i - 1], coulomb_kernel_sum(grid, &change, probe)?)
        }
        None => (0.0, 0.0),
    };
    let centre = grid.points() / 2;
    let probe_distance = probe.iter().map(|&i| ((i as f64 - centre as f64) * grid.spacing()).powi(2)).sum::<f64>().sqrt();
    Ok(InstantaneityReport {
        source_change_time: step.map(|i| times[i]),
        response_time: response.map(|i| times[i]),
        simultaneous: step == response,
        delta_phi,
        kernel_prediction,
        prediction_error: (delta_phi - kernel_prediction).abs(),
        times,
        probe,
        probe_distance,
        probe_potential,
        note: "the jump is in the gauge potential phi, which is not measurable by itself; \
               no statement is made about propagation of E or B"
            .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_source_gives_no_response() {
        let g = GaugeGrid::new(8, 1.0).unwrap();
        let mut r = g.zeros();
        r[g.index([4, 4, 4])] = 1.0;
        let rep = instantaneity_demo(g, &[r.clone(), r.clone(), r], 0.1, [0, 0, 0]).unwrap();
        assert_eq!(rep.delta_phi, 0.0);
        assert_eq!(rep.response_time, None);
        assert!(rep.simultaneous);
    }
}
