use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Upper bound on the total number of grid points unless a caller asks for more.
pub const DEFAULT_POINT_CAP: usize = 1 << 20;

/// Smallest per-axis size accepted by the time-evolution routines.
pub const MIN_EVOLUTION_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    HardWall,
}

/// Uniform tensor grid in one or two dimensions, same spacing on every axis.
///
/// Point `j` on an axis sits at `origin + j * spacing`. For hard-wall grids
/// the walls sit one spacing outside the first and last point; the wavefunction
/// vanishes there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridConfig", into = "GridConfig")]
pub struct SpatialGrid {
    dim: usize,
    points: usize,
    spacing: f64,
    boundary: Boundary,
    origin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub points: usize,
    pub spacing: f64,
    pub boundary: Boundary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<f64>,
}

impl TryFrom<GridConfig> for SpatialGrid {
    type Error = Error;

    fn try_from(c: GridConfig) -> Result<Self> {
        let grid = SpatialGrid::new(c.dim, c.points, c.spacing, c.boundary)?;
        Ok(match c.origin {
            Some(o) => grid.with_origin(o),
            None => grid,
        })
    }
}

impl From<SpatialGrid> for GridConfig {
    fn from(g: SpatialGrid) -> Self {
        GridConfig {
            dim: g.dim,
            points: g.points,
            spacing: g.spacing,
            boundary: g.boundary,
            origin: Some(g.origin),
        }
    }
}

impl SpatialGrid {
    /// Centered grid: periodic grids cover `[-L/2, L/2)`, hard-wall grids have
    /// their walls at `±L/2` with `L = (points + 1) * spacing`.
    pub fn new(dim: usize, points: usize, spacing: f64, boundary: Boundary) -> Result<Self> {
        Self::with_cap(dim, points, spacing, boundary, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(
        dim: usize,
        points: usize,
        spacing: f64,
        boundary: Boundary,
        cap: usize,
    ) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::invalid(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if points < 2 {
            return Err(Error::invalid("grid needs at least two points per axis"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid(format!("grid spacing must be positive, got {spacing}")));
        }
        let total = points.checked_pow(dim as u32).unwrap_or(usize::MAX);
        if total > cap {
            return Err(Error::SizeCap { dimension: total, cap });
        }
        let origin = match boundary {
            Boundary::Periodic => -((points / 2) as f64) * spacing,
            Boundary::HardWall => -0.5 * (points as f64 - 1.0) * spacing,
        };
        Ok(SpatialGrid { dim, points, spacing, boundary, origin })
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn total_points(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.points; self.dim]
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn coord(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.spacing
    }

    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.coord(j)).collect()
    }

    /// Period along one axis (periodic) or wall-to-wall width (hard wall).
    pub fn length(&self) -> f64 {
        match self.boundary {
            Boundary::Periodic => self.points as f64 * self.spacing,
            Boundary::HardWall => (self.points + 1) as f64 * self.spacing,
        }
    }

    /// Lower and upper limits of admissible positions on one axis.
    pub fn extent(&self) -> (f64, f64) {
        match self.boundary {
            Boundary::Periodic => {
                let lo = self.origin - 0.5 * self.spacing;
                (lo, lo + self.length())
            }
            Boundary::HardWall => (
                self.origin - self.spacing,
                self.coord(self.points - 1) + self.spacing,
            ),
        }
    }

    /// Per-axis indices of flat index `flat` (axis 0 varies slowest).
    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        match self.dim {
            1 => [flat, 0],
            _ => [flat / self.points, flat % self.points],
        }
    }

    pub fn flatten(&self, idx: [usize; 2]) -> usize {
        match self.dim {
            1 => idx[0],
            _ => idx[0] * self.points + idx[1],
        }
    }

    /// Coordinates of the point with flat index `flat`.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let [i, j] = self.unflatten(flat);
        match self.dim {
            1 => [self.coord(i), 0.0],
            _ => [self.coord(i), self.coord(j)],
        }
    }

    /// Maps a coordinate back into the fundamental periodic cell; hard-wall
    /// coordinates are returned unchanged.
    pub fn wrap(&self, x: f64) -> f64 {
        match self.boundary {
            Boundary::Periodic => {
                let (lo, _) = self.extent();
                let len = self.length();
                lo + (x - lo).rem_euclid(len)
            }
            Boundary::HardWall => x,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.extent();
        match self.boundary {
            Boundary::Periodic => x.is_finite(),
            Boundary::HardWall => x >= lo && x <= hi,
        }
    }

    pub(crate) fn require_evolution_size(&self) -> Result<()> {
        if self.points < MIN_EVOLUTION_POINTS {
            return Err(Error::invalid(format!(
                "evolution grids need at least {MIN_EVOLUTION_POINTS} points per axis, got {}",
                self.points
            )));
        }
        Ok(())
    }
}
