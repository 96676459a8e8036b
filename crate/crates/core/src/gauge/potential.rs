use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{GaugeGrid, ScalarField, Spectral, VectorField};
use crate::qm::fft::FftNd;
use crate::{Error, Result};

/// `∫ d³u / |u|` over the unit cube centred on the origin; cell average of
/// the Coulomb kernel at zero separation in units of `1/h`. Closed form
/// `3 ln(2 + √3) − π/2`.
pub const UNIT_CUBE_INVERSE_DISTANCE: f64 = 2.380_077_363_979_553;

/// Relative tolerance on `Σρ` for the periodic solvability condition.
pub const NEUTRALITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoissonMode {
    /// Periodic box; needs `Σρ = 0`.
    #[default]
    Periodic,
    /// Free-space `1/4π|x−x'|` kernel via zero padding.
    Isolated,
}

/// Transverse part of `a`: removes the longitudinal Fourier components, so
/// `∇·A_T = 0` and `A − A_T` is a gradient. The uniform component is kept.
pub fn coulomb_project(spec: &Spectral, a: &VectorField) -> Result<VectorField> {
    let grid = spec.grid();
    for c in a {
        grid.check(c, "vector potential")?;
    }
    let mut hats: Vec<Vec<Complex64>> = a.iter().map(|c| spec.forward(c)).collect();
    for p in 0..grid.len() {
        let k = spec.kvec(p);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let dot = (0..3).map(|i| k[i] * hats[i][p]).sum::<Complex64>() / k2;
        for (i, h) in hats.iter_mut().enumerate() {
            h[p] -= k[i] * dot;
        }
    }
    let mut it = hats.into_iter().map(|h| spec.inverse(h));
    Ok([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
}

/// Coulomb kernel `G(r) = 1/(4π r)` with the cell-averaged self term.
pub fn coulomb_kernel(r: f64, spacing: f64) -> f64 {
    if r == 0.0 {
        UNIT_CUBE_INVERSE_DISTANCE / (4.0 * PI * spacing)
    } else {
        1.0 / (4.0 * PI * r)
    }
}

/// Direct sum `φ(x) = h³ Σ ρ(x') G(|x − x'|)` at site `site`; O(N³).
pub fn coulomb_kernel_sum(grid: GaugeGrid, rho: &[f64], site: [usize; 3]) -> Result<f64> {
    grid.check(rho, "charge density")?;
    let h = grid.spacing();
    let mut sum = 0.0;
    for (p, &q) in rho.iter().enumerate() {
        if q == 0.0 {
            continue;
        }
        let s = grid.site(p);
        let r2: f64 = (0..3).map(|a| ((s[a] as f64 - site[a] as f64) * h).powi(2)).sum();
        sum += q * coulomb_kernel(r2.sqrt(), h);
    }
    Ok(sum * grid.cell_volume())
}

/// Solves `∇²φ = −ρ`.
pub fn solve_scalar_potential(spec: &Spectral, rho: &[f64], mode: PoissonMode) -> Result<ScalarField> {
    let grid = spec.grid();
    grid.check(rho, "charge density")?;
    match mode {
        PoissonMode::Periodic => {
            let net: f64 = rho.iter().sum();
            let scale: f64 = rho.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
            if net.abs() > NEUTRALITY_TOLERANCE * scale {
                return Err(Error::NonNeutral { net_charge: net * grid.cell_volume() });
            }
            let mut hat = spec.forward(rho);
            for (p, z) in hat.iter_mut().enumerate() {
                let k2 = spec.k2_full(p);
                *z = if k2 == 0.0 { Complex64::new(0.0, 0.0) } else { *z / k2 };
            }
            Ok(spec.inverse(hat))
        }
        PoissonMode::Isolated => Ok(isolated_potential(grid, rho)),
    }
}

/// Hockney zero-padded convolution on a `(2n)³` grid; equals
/// [`coulomb_kernel_sum`] at every site up to FFT round-off.
fn isolated_potential(grid: GaugeGrid, rho: &[f64]) -> ScalarField {
    let n = grid.points();
    let m = 2 * n;
    let h = grid.spacing();
    let fft = FftNd::new(&[m, m, m]);
    let idx = |i: usize, j: usize, l: usize| (i * m + j) * m + l;
    let offset = |i: usize| if i < n { i as f64 } else { i as f64 - m as f64 };
    let mut kernel = vec![Complex64::new(0.0, 0.0); m * m * m];
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                let r = h * (offset(i).powi(2) + offset(j).powi(2) + offset(l).powi(2)).sqrt();
                kernel[idx(i, j, l)] = Complex64::new(coulomb_kernel(r, h), 0.0);
            }
        }
    }
    let mut src = vec![Complex64::new(0.0, 0.0); m * m * m];
    for (p, &q) in rho.iter().enumerate() {
        let [i, j, l] = grid.site(p);
        src[idx(i, j, l)] = Complex64::new(q * grid.cell_volume(), 0.0);
    }
    fft.forward(&mut kernel);
    fft.forward(&mut src);
    src.iter_mut().zip(&kernel).for_each(|(s, k)| *s *= k);
    fft.inverse(&mut src);
    (0..grid.len())
        .map(|p| {
            let [i, j, l] = grid.site(p);
            src[idx(i, j, l)].re
        })
        .collect()
}

/// `max |∇²φ + ρ|` with the spectral Laplacian.
pub fn poisson_residual(spec: &Spectral, phi: &[f64], rho: &[f64]) -> f64 {
    spec.laplacian(phi).iter().zip(rho).fold(0.0, |m, (l, r)| m.max((l + r).abs()))
}
