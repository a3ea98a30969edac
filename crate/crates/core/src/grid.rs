use crate::error::{Error, Result};

/// Largest number of cells allowed along one axis.
pub const MAX_CELLS_PER_AXIS: usize = 8192;

/// A transverse sampling grid centered on the beam axis.
///
/// Cell `(i, j)` sits at `x = (i - nx/2 + 1/2) dx`, `y = (j - ny/2 + 1/2) dy`
/// in millimetres. Cell data is stored row-major with `j` (the y index) as
/// the row, i.e. at `j * nx + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Config(format!("grid needs at least 2x2 cells, got {nx}x{ny}")));
        }
        if nx > MAX_CELLS_PER_AXIS || ny > MAX_CELLS_PER_AXIS {
            return Err(Error::Config(format!(
                "grid {nx}x{ny} exceeds {MAX_CELLS_PER_AXIS} cells per axis"
            )));
        }
        if !(dx > 0.0 && dx.is_finite() && dy > 0.0 && dy.is_finite()) {
            return Err(Error::Config(format!("grid pitch must be positive, got ({dx}, {dy}) mm")));
        }
        Ok(Grid { nx, ny, dx, dy })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn extent_x(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn extent_y(&self) -> f64 {
        self.ny as f64 * self.dy
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.nx as f64 / 2.0 + 0.5) * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - self.ny as f64 / 2.0 + 0.5) * self.dy
    }

    /// Coordinates of the cell at flat index `k`.
    pub fn coords(&self, k: usize) -> (f64, f64) {
        (self.x(k % self.nx), self.y(k / self.nx))
    }

    pub fn flat(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Index of the cell whose center is nearest to `x`, if inside the grid.
    pub fn index_x(&self, x: f64) -> Option<usize> {
        nearest(x / self.dx + self.nx as f64 / 2.0 - 0.5, self.nx)
    }

    pub fn index_y(&self, y: f64) -> Option<usize> {
        nearest(y / self.dy + self.ny as f64 / 2.0 - 0.5, self.ny)
    }

    /// Nearest-cell binning: the cell whose area contains `(x, y)`.
    pub fn bin(&self, x: f64, y: f64) -> Option<usize> {
        Some(self.flat(self.index_x(x)?, self.index_y(y)?))
    }

    /// Fractional cell coordinates `(u, v)`, where integer values land on
    /// cell centers. Used for interpolation.
    pub fn fractional(&self, x: f64, y: f64) -> (f64, f64) {
        (
            x / self.dx + self.nx as f64 / 2.0 - 0.5,
            y / self.dy + self.ny as f64 / 2.0 - 0.5,
        )
    }
}

fn nearest(u: f64, n: usize) -> Option<usize> {
    let r = u.round();
    if r >= 0.0 && r < n as f64 {
        Some(r as usize)
    } else {
        None
    }
}

/// Builds a centered square-pitch grid covering the requested extents.
pub fn make_grid(extent_x_mm: f64, extent_y_mm: f64, pitch_mm: f64) -> Result<Grid> {
    for (name, v) in [("extent_x", extent_x_mm), ("extent_y", extent_y_mm), ("pitch", pitch_mm)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("{name} must be positive, got {v} mm")));
        }
    }
    let nx = (extent_x_mm / pitch_mm).round();
    let ny = (extent_y_mm / pitch_mm).round();
    if nx > MAX_CELLS_PER_AXIS as f64 || ny > MAX_CELLS_PER_AXIS as f64 {
        return Err(Error::Config(format!(
            "extent/pitch gives {nx}x{ny} cells, limit is {MAX_CELLS_PER_AXIS} per axis"
        )));
    }
    Grid::new(nx as usize, ny as usize, pitch_mm, pitch_mm)
}
