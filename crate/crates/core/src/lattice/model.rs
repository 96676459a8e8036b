use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which physical system the lattice describes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LatticeKind {
    /// Atoms of mass `atom_mass` joined by springs `spring`; `pinning` is an
    /// optional on-site spring that lifts the translation zero mode.
    AtomChain {
        atom_mass: f64,
        spring: f64,
        #[serde(default)]
        pinning: f64,
    },
    /// Free scalar field of mass `mass` in units with `c_s = 1`.
    ScalarField { mass: f64 },
}

/// Periodic 1D lattice with quadratic Hamiltonian
/// `H = Σ_x p_x²/2μ + ½ Σ_{xy} φ_x K_xy φ_y`.
///
/// For the chain `φ_x` is the displacement and `μ = m_a`; for the scalar
/// field `φ_x` is the field value and `μ = a`, so that `p_x = a π(x)`.
/// Normal-mode frequencies are `ω_k² = eig(K)/μ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawModel")]
pub struct LatticeModel {
    sites: usize,
    spacing: f64,
    kind: LatticeKind,
    hbar: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    sites: usize,
    spacing: f64,
    kind: LatticeKind,
    #[serde(default = "one")]
    hbar: f64,
}

impl TryFrom<RawModel> for LatticeModel {
    type Error = Error;

    fn try_from(r: RawModel) -> Result<Self> {
        LatticeModel::new(r.sites, r.spacing, r.kind, r.hbar)
    }
}

impl LatticeModel {
    pub fn new(sites: usize, spacing: f64, kind: LatticeKind, hbar: f64) -> Result<Self> {
        let m = LatticeModel { sites, spacing, kind, hbar };
        m.validate()?;
        Ok(m)
    }

    pub fn atom_chain(sites: usize, spacing: f64, atom_mass: f64, spring: f64) -> Result<Self> {
        Self::new(sites, spacing, LatticeKind::AtomChain { atom_mass, spring, pinning: 0.0 }, 1.0)
    }

    pub fn pinned_chain(sites: usize, spacing: f64, atom_mass: f64, spring: f64, pinning: f64) -> Result<Self> {
        Self::new(sites, spacing, LatticeKind::AtomChain { atom_mass, spring, pinning }, 1.0)
    }

    pub fn scalar_field(sites: usize, spacing: f64, mass: f64) -> Result<Self> {
        Self::new(sites, spacing, LatticeKind::ScalarField { mass }, 1.0)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    /// Checks parameters (also needed after deserializing).
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if self.sites == 0 {
            return Err(Error::invalid("lattice needs at least one site"));
        }
        if !pos(self.spacing) || !pos(self.hbar) {
            return Err(Error::invalid("spacing and hbar must be positive"));
        }
        match self.kind {
            LatticeKind::AtomChain { atom_mass, spring, pinning } => {
                if !pos(atom_mass) || !(spring >= 0.0) || !(pinning >= 0.0) || !spring.is_finite() || !pinning.is_finite() {
                    return Err(Error::invalid("chain needs positive mass and non-negative springs"));
                }
            }
            LatticeKind::ScalarField { mass } => {
                if !(mass >= 0.0 && mass.is_finite()) {
                    return Err(Error::invalid("field mass must be non-negative"));
                }
            }
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn length(&self) -> f64 {
        self.sites as f64 * self.spacing
    }

    /// Same model on a lattice with `sites` sites and spacing `spacing`.
    pub fn resized(&self, sites: usize, spacing: f64) -> Result<Self> {
        Self::new(sites, spacing, self.kind, self.hbar)
    }

    /// Per-site inertia `μ`.
    pub fn inertia(&self) -> f64 {
        match self.kind {
            LatticeKind::AtomChain { atom_mass, .. } => atom_mass,
            LatticeKind::ScalarField { .. } => self.spacing,
        }
    }

    /// Nearest-neighbour coupling `c` and on-site term `s`:
    /// `K = (s + 2c) 1 − c (shift + shift⁻¹)`.
    pub fn couplings(&self) -> (f64, f64) {
        match self.kind {
            LatticeKind::AtomChain { spring, pinning, .. } => (spring, pinning),
            LatticeKind::ScalarField { mass } => (1.0 / self.spacing, self.spacing * mass * mass),
        }
    }

    /// Dense stiffness matrix `K` (row-major, `N × N`).
    pub fn stiffness(&self) -> Vec<f64> {
        let n = self.sites;
        let (c, s) = self.couplings();
        let mut k = vec![0.0; n * n];
        for x in 0..n {
            k[x * n + x] += s + 2.0 * c;
            k[x * n + (x + 1) % n] -= c;
            k[x * n + (x + n - 1) % n] -= c;
        }
        k
    }

    /// `k_j = 2πj/(Na)`, `j = 0..N`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.length()
    }

    /// Wavenumber folded into the first Brillouin zone, `(−π/a, π/a]`.
    pub fn signed_wavenumber(&self, j: usize) -> f64 {
        let n = self.sites;
        if 2 * j <= n {
            self.wavenumber(j)
        } else {
            -self.wavenumber(n - j)
        }
    }

    /// `ω(k)` for a continuous wavenumber.
    pub fn omega_at(&self, k: f64) -> f64 {
        let (c, s) = self.couplings();
        let w2 = (s + 4.0 * c * (0.5 * k * self.spacing).sin().powi(2)) / self.inertia();
        w2.max(0.0).sqrt()
    }

    pub fn omega(&self, j: usize) -> f64 {
        self.omega_at(self.wavenumber(j))
    }

    /// `ω_k` for `j = 0..N`.
    pub fn dispersion(&self) -> Vec<f64> {
        (0..self.sites).map(|j| self.omega(j)).collect()
    }

    /// Long-wavelength slope `c_s = a √(c/μ)`: `a√(κ/m_a)` for the chain, 1 for the field.
    pub fn sound_speed(&self) -> f64 {
        let (c, _) = self.couplings();
        self.spacing * (c / self.inertia()).sqrt()
    }

    /// Frequency gap at `k = 0`.
    pub fn gap(&self) -> f64 {
        self.omega(0)
    }

    /// True when the `k = 0` mode has zero frequency (unpinned chain, massless field).
    pub fn has_zero_mode(&self) -> bool {
        self.couplings().1 == 0.0
    }

    /// Vacuum energy `Σ ħω_k/2`.
    pub fn vacuum_energy(&self) -> f64 {
        0.5 * self.hbar * self.dispersion().iter().sum::<f64>()
    }

    /// Columns `j,k,omega,omega_over_cs_k`.
    pub fn write_dispersion_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["j", "k", "omega", "omega_over_cs_k"])?;
        let cs = self.sound_speed();
        for j in 0..self.sites {
            let k = self.wavenumber(j);
            let ratio = if j == 0 { f64::NAN } else { self.omega(j) / (cs * k) };
            w.write_record([j.to_string(), k.to_string(), self.omega(j).to_string(), ratio.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
