use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qm::fft::{derivative_wavenumbers, wavenumbers, FftNd};
use crate::{Error, Result};

/// Largest accepted points per axis.
pub const GAUGE_POINT_CAP: usize = 32;

pub type ScalarField = Vec<f64>;
pub type VectorField = [Vec<f64>; 3];

/// Periodic cubic grid with `points³` sites; site `(i, j, l)` sits at
/// `(origin + i h, origin + j h, origin + l h)` with `origin = -(points/2) h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GaugeGrid {
    points: usize,
    spacing: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    points: usize,
    spacing: f64,
}

impl TryFrom<RawGrid> for GaugeGrid {
    type Error = Error;
    fn try_from(r: RawGrid) -> Result<Self> {
        GaugeGrid::new(r.points, r.spacing)
    }
}

impl GaugeGrid {
    pub fn new(points: usize, spacing: f64) -> Result<Self> {
        if !(4..=GAUGE_POINT_CAP).contains(&points) {
            return Err(Error::invalid(format!("gauge grid needs 4..={GAUGE_POINT_CAP} points per axis, got {points}")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid(format!("gauge grid spacing must be positive, got {spacing}")));
        }
        Ok(GaugeGrid { points, spacing })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(3)
    }

    pub fn origin(&self) -> f64 {
        -((self.points / 2) as f64) * self.spacing
    }

    pub fn index(&self, [i, j, l]: [usize; 3]) -> usize {
        (i * self.points + j) * self.points + l
    }

    pub fn site(&self, flat: usize) -> [usize; 3] {
        let n = self.points;
        [flat / (n * n), (flat / n) % n, flat % n]
    }

    pub fn position(&self, flat: usize) -> [f64; 3] {
        self.site(flat).map(|i| self.origin() + i as f64 * self.spacing)
    }

    pub fn zeros(&self) -> ScalarField {
        vec![0.0; self.len()]
    }

    pub fn zero_vector(&self) -> VectorField {
        [self.zeros(), self.zeros(), self.zeros()]
    }

    pub(crate) fn check(&self, f: &[f64], what: &str) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::Shape(format!("{what} has {} values, grid has {}", f.len(), self.len())));
        }
        if f.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("{what} contains non-finite values")));
        }
        Ok(())
    }
}

/// FFT plan plus wavenumber tables for spectral derivatives on a [`GaugeGrid`].
pub struct Spectral {
    grid: GaugeGrid,
    fft: FftNd,
    /// Nyquist-zeroed, for first derivatives.
    kd: Vec<f64>,
    /// Full, for the Laplacian.
    kf: Vec<f64>,
}

impl Spectral {
    pub fn new(grid: GaugeGrid) -> Self {
        let n = grid.points();
        Spectral {
            grid,
            fft: FftNd::new(&[n, n, n]),
            kd: derivative_wavenumbers(n, grid.spacing()),
            kf: wavenumbers(n, grid.spacing()),
        }
    }

    pub fn grid(&self) -> GaugeGrid {
        self.grid
    }

    pub(crate) fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fft.forward(&mut buf);
        buf
    }

    pub(crate) fn inverse(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.fft.inverse(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Derivative wavevector of flat spectral index `p`.
    pub(crate) fn kvec(&self, p: usize) -> [f64; 3] {
        self.grid.site(p).map(|i| self.kd[i])
    }

    pub(crate) fn k2_full(&self, p: usize) -> f64 {
        self.grid.site(p).map(|i| self.kf[i] * self.kf[i]).iter().sum()
    }

    pub fn gradient(&self, f: &[f64]) -> VectorField {
        let fh = self.forward(f);
        std::array::from_fn(|a| {
            let g = fh.iter().enumerate().map(|(p, z)| Complex64::new(0.0, self.kvec(p)[a]) * z).collect();
            self.inverse(g)
        })
    }

    pub fn divergence(&self, v: &VectorField) -> ScalarField {
        let hats: Vec<Vec<Complex64>> = v.iter().map(|c| self.forward(c)).collect();
        let out = (0..self.grid.len())
            .map(|p| {
                let k = self.kvec(p);
                (0..3).map(|a| Complex64::new(0.0, k[a]) * hats[a][p]).sum()
            })
            .collect();
        self.inverse(out)
    }

    pub fn curl(&self, v: &VectorField) -> VectorField {
        let hats: Vec<Vec<Complex64>> = v.iter().map(|c| self.forward(c)).collect();
        std::array::from_fn(|a| {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let out = (0..self.grid.len())
                .map(|p| {
                    let k = self.kvec(p);
                    Complex64::new(0.0, 1.0) * (k[b] * hats[c][p] - k[c] * hats[b][p])
                })
                .collect();
            self.inverse(out)
        })
    }

    pub fn laplacian(&self, f: &[f64]) -> ScalarField {
        let fh = self.forward(f);
        let out = fh.iter().enumerate().map(|(p, z)| -self.k2_full(p) * z).collect();
        self.inverse(out)
    }
}

pub(crate) fn max_abs(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wave(grid: GaugeGrid, k: [f64; 3], phase: f64) -> ScalarField {
        (0..grid.len())
            .map(|p| {
                let x = grid.position(p);
                (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + phase).sin()
            })
            .collect()
    }

    #[test]
    fn derivatives_of_a_plane_wave() {
        let g = GaugeGrid::new(16, 0.5).unwrap();
        let kk = 2.0 * std::f64::consts::PI / 8.0;
        let k = [kk, 2.0 * kk, 0.0];
        let f = wave(g, k, 0.3);
        let s = Spectral::new(g);
        let grad = s.gradient(&f);
        let lap = s.laplacian(&f);
        for p in 0..g.len() {
            let x = g.position(p);
            let c = (k[0] * x[0] + k[1] * x[1] + 0.3).cos();
            assert!((grad[0][p] - k[0] * c).abs() < 1e-11);
            assert!((grad[1][p] - k[1] * c).abs() < 1e-11);
            assert!(grad[2][p].abs() < 1e-12);
            assert!((lap[p] + 5.0 * kk * kk * f[p]).abs() < 1e-10);
        }
    }

    #[test]
    fn curl_of_gradient_and_divergence_of_curl_vanish() {
        let g = GaugeGrid::new(8, 1.0).unwrap();
        let f: ScalarField = (0..g.len()).map(|p| ((p * 7919) % 113) as f64 / 113.0).collect();
        let s = Spectral::new(g);
        let c = s.curl(&s.gradient(&f));
        assert!(c.iter().all(|v| max_abs(v) < 1e-12));
        let v = [f.clone(), f.iter().map(|x| x * x).collect(), f.iter().map(|x| x.sin()).collect()];
        assert!(max_abs(&s.divergence(&s.curl(&v))) < 1e-12);
    }

    #[test]
    fn rejects_oversized_grid() {
        assert!(GaugeGrid::new(33, 1.0).is_err());
        assert!(GaugeGrid::new(3, 1.0).is_err());
        assert!(serde_json::from_str::<GaugeGrid>(r#"{"points":8,"spacing":1.0,"x":1}"#).is_err());
    }
}
