use std::io::Write;

use num_complex::Complex64;

use super::grid::SpatialGrid;
use crate::{Error, Result};

/// Complex amplitudes over grid points times internal components.
///
/// Storage is component-major: amplitude of component `c` at flat point `p`
/// lives at `c * grid.total_points() + p`. Internal components are
/// non-ontic: every density or current is summed over them.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    grid: SpatialGrid,
    components: usize,
    amps: Vec<Complex64>,
    time: f64,
}

impl WaveFunction {
    pub fn new(grid: SpatialGrid, components: usize, amps: Vec<Complex64>, time: f64) -> Result<Self> {
        if components == 0 {
            return Err(Error::invalid("wavefunction needs at least one component"));
        }
        let expected = grid.total_points() * components;
        if amps.len() != expected {
            return Err(Error::Shape(format!(
                "expected {expected} amplitudes, got {}",
                amps.len()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("wavefunction amplitudes must be finite"));
        }
        Ok(WaveFunction { grid, components, amps, time })
    }

    /// Single-component wavefunction sampled from `f(x, y)` (`y` is ignored in 1D).
    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let amps = (0..grid.total_points())
            .map(|p| {
                let [x, y] = grid.point(p);
                f(x, y)
            })
            .collect();
        WaveFunction::new(grid, 1, amps, 0.0)
    }

    /// Multi-component wavefunction, `f(component, x, y)`.
    pub fn from_component_fn(
        grid: SpatialGrid,
        components: usize,
        f: impl Fn(usize, f64, f64) -> Complex64,
    ) -> Result<Self> {
        let n = grid.total_points();
        let mut amps = Vec::with_capacity(n * components);
        for c in 0..components {
            for p in 0..n {
                let [x, y] = grid.point(p);
                amps.push(f(c, x, y));
            }
        }
        WaveFunction::new(grid, components, amps, 0.0)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub(crate) fn set_time(&mut self, time: f64) {
        self.time = time;
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.total_points();
        &self.amps[c * n..(c + 1) * n]
    }

    /// Component-summed probability density `ψ†ψ` per grid point.
    pub fn density(&self) -> Vec<f64> {
        let n = self.grid.total_points();
        let mut rho = vec![0.0; n];
        for c in 0..self.components {
            for (r, z) in rho.iter_mut().zip(self.component(c)) {
                *r += z.norm_sqr();
            }
        }
        rho
    }

    /// Grid-quadrature L2 norm squared, summed over components.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::invalid("cannot normalize a zero or non-finite wavefunction"));
        }
        let s = 1.0 / n.sqrt();
        self.amps.iter_mut().for_each(|z| *z *= s);
        Ok(self)
    }

    /// `Σ ψ†ψ · observable · dV`.
    pub fn expectation(&self, observable: &[f64]) -> Result<f64> {
        let n = self.grid.total_points();
        if observable.len() != n {
            return Err(Error::Shape(format!(
                "observable has {} values, grid has {n} points",
                observable.len()
            )));
        }
        if observable.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("observable must be finite"));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..self.components {
            for (z, o) in self.component(c).iter().zip(observable) {
                acc += z.conj() * *o * z;
            }
        }
        Ok(acc.re * self.grid.cell_volume())
    }

    /// Evaluates `f(x, y)` on the grid; convenient for observables.
    pub fn observable(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.grid.total_points())
            .map(|p| {
                let [x, y] = self.grid.point(p);
                f(x, y)
            })
            .collect()
    }

    /// `⟨self|other⟩` with grid quadrature.
    pub fn overlap(&self, other: &WaveFunction) -> Result<Complex64> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::Shape("overlap of wavefunctions on different grids".into()));
        }
        let acc: Complex64 = self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(acc * self.grid.cell_volume())
    }

    /// CSV snapshot with columns `x[,y],component,re,im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x"];
        if self.grid.dim() == 2 {
            header.push("y");
        }
        header.extend(["component", "re", "im"]);
        w.write_record(&header)?;
        let n = self.grid.total_points();
        for c in 0..self.components {
            for p in 0..n {
                let [x, y] = self.grid.point(p);
                let z = self.amps[c * n + p];
                let mut row = vec![x.to_string()];
                if self.grid.dim() == 2 {
                    row.push(y.to_string());
                }
                row.extend([c.to_string(), z.re.to_string(), z.im.to_string()]);
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qm::Boundary;

    fn gaussian(grid: SpatialGrid, x0: f64, sigma: f64) -> WaveFunction {
        WaveFunction::from_fn(grid, |x, _| {
            Complex64::new((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), 0.0)
        })
        .unwrap()
        .normalized()
        .unwrap()
    }

    #[test]
    fn unit_observable_gives_norm() {
        let g = SpatialGrid::new(1, 256, 0.1, Boundary::Periodic).unwrap();
        let psi = gaussian(g, 0.0, 1.0);
        let one = psi.observable(|_, _| 1.0);
        assert!((psi.expectation(&one).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_density_has_zero_mean() {
        let g = SpatialGrid::new(1, 256, 0.1, Boundary::HardWall).unwrap();
        let psi = gaussian(g, 0.0, 1.3);
        let x = psi.observable(|x, _| x);
        assert!(psi.expectation(&x).unwrap().abs() < 1e-10);
    }

    #[test]
    fn harmonic_ground_second_moment() {
        // ground state of ½mω²x²: σ² = ħ/(2mω)
        let (m, w) = (2.0f64, 1.5f64);
        let sigma = (1.0 / (2.0 * m * w)).sqrt();
        let g = SpatialGrid::new(1, 512, 0.02, Boundary::Periodic).unwrap();
        let psi = gaussian(g, 0.0, sigma);
        let x2 = psi.observable(|x, _| x * x);
        assert!((psi.expectation(&x2).unwrap() - 1.0 / (2.0 * m * w)).abs() < 1e-5);
    }

    #[test]
    fn shape_errors() {
        let g = SpatialGrid::new(1, 16, 0.1, Boundary::Periodic).unwrap();
        let psi = gaussian(g, 0.0, 0.3);
        assert!(matches!(psi.expectation(&[1.0; 15]), Err(Error::Shape(_))));
        assert!(WaveFunction::new(psi.grid().clone(), 2, vec![Complex64::new(1.0, 0.0); 16], 0.0).is_err());
    }

    #[test]
    fn csv_has_expected_columns() {
        let g = SpatialGrid::new(2, 8, 0.5, Boundary::Periodic).unwrap();
        let psi = WaveFunction::from_component_fn(g, 2, |c, x, y| Complex64::new(x + c as f64, y)).unwrap();
        let mut buf = Vec::new();
        psi.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x,y,component,re,im");
        assert_eq!(text.lines().count(), 1 + 2 * 64);
    }
}
