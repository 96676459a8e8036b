use num_complex::Complex64;

use crate::qm::interp::{stencil, Stencil};
use crate::qm::{gradient, HamiltonianSpec, MomentumCoupling, WaveFunction};
use crate::{Error, Result};

/// Default node threshold, relative to the peak density of the wavefunction.
pub const DEFAULT_NODE_THRESHOLD: f64 = 1e-12;

/// Everything needed to evaluate the guidance velocity
/// `v_a = (ħ/m_a) Im(ψ†∂_aψ) / ψ†ψ` at arbitrary points for one wavefunction
/// snapshot: amplitudes and spectral gradients on the grid, interpolated
/// with local cubic stencils.
#[derive(Clone, Debug)]
pub struct GuidanceField {
    psi: WaveFunction,
    /// `[ψ, ∂_0ψ, (∂_1ψ)]` per component and grid point, packed for locality.
    packed: Vec<Complex64>,
    masses: Vec<f64>,
    hbar: f64,
    drift: Option<MomentumCoupling>,
    node_threshold: f64,
    peak: f64,
}

/// Interpolated density and current numerators at one point.
#[derive(Clone, Copy, Debug)]
pub struct LocalAmplitude {
    pub density: f64,
    /// `Σ_s ψ_s* ∂_a ψ_s` per axis.
    pub current: [Complex64; 2],
}

impl GuidanceField {
    pub fn new(psi: &WaveFunction, h: &HamiltonianSpec) -> Result<Self> {
        h.validate(psi.grid(), psi.components())?;
        let peak = psi.density().into_iter().fold(0.0, f64::max);
        let grad = gradient(psi);
        let dim = psi.grid().dim();
        let mut packed = Vec::with_capacity(psi.amplitudes().len() * (dim + 1));
        for (p, z) in psi.amplitudes().iter().enumerate() {
            packed.push(*z);
            packed.extend(grad.iter().map(|g| g[p]));
        }
        Ok(GuidanceField {
            packed,
            psi: psi.clone(),
            masses: h.masses.clone(),
            hbar: h.hbar,
            drift: h.momentum_coupling,
            node_threshold: DEFAULT_NODE_THRESHOLD * peak,
            peak,
        })
    }

    /// Sets the node threshold relative to the peak grid density.
    pub fn with_relative_node_threshold(mut self, rel: f64) -> Self {
        self.node_threshold = rel * self.peak;
        self
    }

    pub fn time(&self) -> f64 {
        self.psi.time()
    }

    pub fn wavefunction(&self) -> &WaveFunction {
        &self.psi
    }

    pub fn node_threshold(&self) -> f64 {
        self.node_threshold
    }

    fn stencils(&self, x: &[f64]) -> [Stencil; 2] {
        let grid = self.psi.grid();
        let s0 = stencil(grid, x[0]);
        let s1 = if grid.dim() == 2 { stencil(grid, x[1]) } else { s0 };
        [s0, s1]
    }

    pub fn local(&self, x: &[f64]) -> LocalAmplitude {
        let grid = self.psi.grid();
        let dim = grid.dim();
        let npts = grid.total_points();
        let [sa, sb] = self.stencils(x);
        let stride = dim + 1;
        let mut density = 0.0;
        let mut current = [Complex64::new(0.0, 0.0); 2];
        for c in 0..self.psi.components() {
            let off = c * npts;
            let mut v = [Complex64::new(0.0, 0.0); 3];
            if dim == 1 {
                for o in 0..4 {
                    if let Some(j) = sa.nodes[o] {
                        let w = sa.weights[o];
                        let q = &self.packed[(off + j) * stride..(off + j + 1) * stride];
                        v[0] += q[0] * w;
                        v[1] += q[1] * w;
                    }
                }
            } else {
                for o in 0..4 {
                    let Some(i) = sa.nodes[o] else { continue };
                    for r in 0..4 {
                        let Some(j) = sb.nodes[r] else { continue };
                        let w = sa.weights[o] * sb.weights[r];
                        let p = off + grid.flatten([i, j]);
                        let q = &self.packed[p * stride..(p + 1) * stride];
                        v[0] += q[0] * w;
                        v[1] += q[1] * w;
                        v[2] += q[2] * w;
                    }
                }
            }
            density += v[0].norm_sqr();
            for a in 0..dim {
                current[a] += v[0].conj() * v[a + 1];
            }
        }
        LocalAmplitude { density, current }
    }

    /// Component-summed density `ψ†ψ` at `x`.
    pub fn density_at(&self, x: &[f64]) -> f64 {
        self.local(x).density
    }

    /// Guidance velocity at `x` (one entry per grid axis).
    pub fn velocity(&self, x: &[f64]) -> Result<[f64; 2]> {
        let dim = self.psi.grid().dim();
        if x.len() != dim {
            return Err(Error::Shape(format!("position has {} coordinates, grid is {dim}D", x.len())));
        }
        let loc = self.local(x);
        if !(loc.density > self.node_threshold) {
            return Err(Error::NodeProximity { density: loc.density });
        }
        let mut v = [0.0; 2];
        for a in 0..dim {
            v[a] = self.hbar / self.masses[a] * loc.current[a].im / loc.density;
        }
        if let Some(mc) = self.drift {
            v[mc.target_axis] += mc.strength * x[mc.source_axis];
        }
        Ok(v)
    }

    /// Velocity samples at every grid point; `None` near nodes.
    pub fn velocity_samples(&self) -> Vec<Option<[f64; 2]>> {
        let grid = self.psi.grid();
        (0..grid.total_points())
            .map(|p| {
                let pt = grid.point(p);
                self.velocity(&pt[..grid.dim()]).ok()
            })
            .collect()
    }
}

/// One-off guidance velocity of `psi` at `x`.
pub fn guidance_velocity(psi: &WaveFunction, h: &HamiltonianSpec, x: &[f64]) -> Result<[f64; 2]> {
    GuidanceField::new(psi, h)?.velocity(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qm::{Boundary, SpatialGrid};
    use std::f64::consts::PI;

    fn grid1() -> SpatialGrid {
        SpatialGrid::new(1, 128, 0.125, Boundary::Periodic).unwrap()
    }

    #[test]
    fn real_wavefunction_has_no_velocity() {
        let g = grid1();
        let psi = WaveFunction::from_fn(g.clone(), |x, _| Complex64::new((-x * x / 2.0).exp(), 0.0)).unwrap();
        let h = HamiltonianSpec::harmonic(&g, 1.0, 1.0);
        let f = GuidanceField::new(&psi, &h).unwrap();
        for &x in &[-2.3, -0.01, 0.0, 0.4, 1.77] {
            assert!(f.velocity(&[x]).unwrap()[0].abs() < 1e-10);
        }
    }

    #[test]
    fn plane_wave_velocity_is_hbar_k_over_m() {
        let g = grid1();
        let k = 2.0 * PI * 5.0 / g.length();
        let psi = WaveFunction::from_fn(g.clone(), |x, _| Complex64::new(0.0, k * x).exp()).unwrap();
        let h = HamiltonianSpec::free(&g, 2.5).with_hbar(0.7);
        let f = GuidanceField::new(&psi, &h).unwrap();
        for &x in &[-7.9, -1.234, 0.0, 3.3, 7.99] {
            let v = f.velocity(&[x]).unwrap()[0];
            assert!((v - 0.7 * k / 2.5).abs() < 1e-8, "{v}");
        }
    }

    #[test]
    fn empty_second_component_reduces_to_single_component() {
        let g = grid1();
        let f = |x: f64| Complex64::new((-(x - 0.5).powi(2)).exp(), 0.0) * Complex64::new(0.0, 1.3 * x + 0.2 * x * x).exp();
        let one = WaveFunction::from_fn(g.clone(), |x, _| f(x)).unwrap();
        let two = WaveFunction::from_component_fn(g.clone(), 2, |c, x, _| {
            if c == 0 { f(x) } else { Complex64::new(0.0, 0.0) }
        })
        .unwrap();
        let h = HamiltonianSpec::free(&g, 1.0);
        let f1 = GuidanceField::new(&one, &h).unwrap();
        let f2 = GuidanceField::new(&two, &h).unwrap();
        for &x in &[-1.0, 0.1, 0.77, 1.5] {
            let (a, b) = (f1.velocity(&[x]).unwrap()[0], f2.velocity(&[x]).unwrap()[0]);
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn node_is_reported_with_density() {
        let g = grid1();
        let psi = WaveFunction::from_fn(g.clone(), |x, _| Complex64::new(x * (-x * x).exp(), 0.0)).unwrap();
        let h = HamiltonianSpec::free(&g, 1.0);
        let f = GuidanceField::new(&psi, &h).unwrap();
        match f.velocity(&[0.0]) {
            Err(Error::NodeProximity { density }) => assert!(density < 1e-20),
            other => panic!("expected node error, got {other:?}"),
        }
    }
}
