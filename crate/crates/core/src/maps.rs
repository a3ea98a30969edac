//! Real-valued images on a [`Grid`].

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Non-negative intensity per grid cell, stored like [`crate::SpinorField`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    grid: Grid,
    values: Vec<f64>,
}

impl IntensityMap {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.nx(),
                grid.ny()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Numerical(format!("intensity value {v} is not a finite non-negative number")));
        }
        Ok(IntensityMap { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        IntensityMap { values: vec![0.0; grid.len()], grid }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.coords(k);
                f(x, y)
            })
            .collect();
        IntensityMap::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.flat(i, j)]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.total() / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs_difference(&self, other: &IntensityMap) -> Result<f64> {
        crate::field::same_grid(&self.grid, &other.grid)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Weighted sum `a self + b other`.
    pub fn combine(&self, a: f64, other: &IntensityMap, b: f64) -> Result<IntensityMap> {
        crate::field::same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        IntensityMap::new(self.grid, values)
    }

    /// Sums `factor x factor` blocks onto a coarser grid centered the same
    /// way. Trailing rows and columns that do not fill a block are dropped
    /// symmetrically where possible.
    pub fn downsample(&self, factor: usize) -> Result<IntensityMap> {
        if factor <= 1 {
            return Ok(self.clone());
        }
        let (nx, ny) = (self.grid.nx() / factor, self.grid.ny() / factor);
        let grid = Grid::new(nx, ny, self.grid.dx() * factor as f64, self.grid.dy() * factor as f64)?;
        let (ox, oy) = ((self.grid.nx() - nx * factor) / 2, (self.grid.ny() - ny * factor) / 2);
        let mut values = vec![0.0; grid.len()];
        for j in 0..ny * factor {
            for i in 0..nx * factor {
                values[grid.flat(i / factor, j / factor)] += self.get(i + ox, j + oy);
            }
        }
        IntensityMap::new(grid, values)
    }

    /// Cell-wise `self / flux`. Cells without flux are set to the
    /// flux-weighted mean ratio so they carry no modulation.
    pub fn normalized_by(&self, flux: &IntensityMap) -> Result<IntensityMap> {
        crate::field::same_grid(&self.grid, &flux.grid)?;
        let total_flux = flux.total();
        if total_flux <= 0.0 {
            return Err(Error::Numerical("no flux reached the camera".into()));
        }
        let fill = self.total() / total_flux;
        let values = self
            .values
            .iter()
            .zip(&flux.values)
            .map(|(v, f)| if *f > 0.0 { v / f } else { fill })
            .collect();
        IntensityMap::new(self.grid, values)
    }

    /// Bilinear interpolation at `(x, y)` mm; `None` outside the cell-center hull.
    pub fn sample(&self, x: f64, y: f64) -> Option<f64> {
        bilinear(&self.grid, x, y, |k| self.values[k])
    }
}

/// Bilinear interpolation of per-cell data between cell centers.
pub(crate) fn bilinear<T>(grid: &Grid, x: f64, y: f64, at: impl Fn(usize) -> T) -> Option<T>
where
    T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    let (u, v) = grid.fractional(x, y);
    let (umax, vmax) = ((grid.nx() - 1) as f64, (grid.ny() - 1) as f64);
    if !(u >= 0.0 && v >= 0.0 && u <= umax && v <= vmax) {
        return None;
    }
    let i0 = (u.floor() as usize).min(grid.nx() - 2);
    let j0 = (v.floor() as usize).min(grid.ny() - 2);
    let (fu, fv) = (u - i0 as f64, v - j0 as f64);
    let k = |i, j| at(grid.flat(i, j));
    Some(
        k(i0, j0) * ((1.0 - fu) * (1.0 - fv))
            + k(i0 + 1, j0) * (fu * (1.0 - fv))
            + k(i0, j0 + 1) * ((1.0 - fu) * fv)
            + k(i0 + 1, j0 + 1) * (fu * fv),
    )
}

/// Principal-branch phases with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    grid: Grid,
    values: Vec<f64>,
    valid: Vec<bool>,
}

impl PhaseMap {
    pub fn new(grid: Grid, values: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        if values.len() != grid.len() || valid.len() != grid.len() {
            return Err(Error::Shape("phase map size does not match grid".into()));
        }
        Ok(PhaseMap { grid, values, valid })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let k = self.grid.flat(i, j);
        self.valid[k].then(|| self.values[k])
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }
}
