use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::par::{self, Execution};
use crate::su2::{Component, Spinor, Su2Map, C64};

/// Tolerance on the unit-norm precondition for input spinors.
const UNIT_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Every cell carries its own unit spinor.
    PerCell,
    /// `sum |psi|^2 dA = 1` over the whole grid.
    Global,
}

/// A spinor per grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    grid: Grid,
    cells: Vec<Spinor>,
    normalization: Normalization,
}

impl SpinorField {
    pub fn from_cells(grid: Grid, cells: Vec<Spinor>, normalization: Normalization) -> Result<Self> {
        if cells.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} amplitudes for a {}x{} grid",
                cells.len(),
                grid.nx(),
                grid.ny()
            )));
        }
        Ok(SpinorField { grid, cells, normalization })
    }

    /// Evaluates `f(x, y)` at every cell center.
    pub fn from_fn(grid: Grid, exec: Execution, f: impl Fn(f64, f64) -> Spinor + Sync + Send) -> Self {
        let cells = par::map_indices(exec, grid.len(), |k| {
            let (x, y) = grid.coords(k);
            f(x, y)
        });
        SpinorField { grid, cells, normalization: Normalization::PerCell }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[Spinor] {
        &self.cells
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn at(&self, i: usize, j: usize) -> Spinor {
        self.cells[self.grid.flat(i, j)]
    }

    /// One component as a complex array in storage order.
    pub fn component(&self, c: Component) -> Vec<C64> {
        self.cells.iter().map(|s| s.component(c)).collect()
    }

    /// `|<c|psi>|^2` per cell.
    pub fn component_intensity(&self, c: Component) -> Vec<f64> {
        self.cells.iter().map(|s| s.component(c).norm_sqr()).collect()
    }

    /// Rescales so the total probability over the grid is one.
    pub fn globally_normalized(&self) -> Result<SpinorField> {
        let total: f64 = self.cells.iter().map(Spinor::norm_sqr).sum::<f64>() * self.grid.cell_area();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Numerical(format!("field has total weight {total}")));
        }
        let s = C64::new(1.0 / total.sqrt(), 0.0);
        Ok(SpinorField {
            grid: self.grid,
            cells: self.cells.iter().map(|c| c.scale(s)).collect(),
            normalization: Normalization::Global,
        })
    }

    /// Multiplies every cell by the same complex factor.
    pub fn with_global_phase(&self, phase: f64) -> SpinorField {
        let p = C64::from_polar(1.0, phase);
        SpinorField { cells: self.cells.iter().map(|c| c.scale(p)).collect(), ..self.clone() }
    }

    /// Largest per-cell deviation from unit norm.
    pub fn max_norm_defect(&self) -> f64 {
        self.cells.iter().map(|s| (s.norm_sqr() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Largest per-cell amplitude difference to another field on the same grid.
    pub fn max_difference(&self, other: &SpinorField) -> Result<f64> {
        same_grid(&self.grid, &other.grid)?;
        Ok(self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| (a.up - b.up).norm().max((a.down - b.down).norm()))
            .fold(0.0, f64::max))
    }
}

pub(crate) fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!(
            "grids differ: {}x{} @ ({}, {}) mm vs {}x{} @ ({}, {}) mm",
            a.nx(),
            a.ny(),
            a.dx(),
            a.dy(),
            b.nx(),
            b.ny(),
            b.dx(),
            b.dy()
        )));
    }
    Ok(())
}

/// Every cell set to `spinor`, which must have unit norm.
pub fn uniform_state(grid: &Grid, spinor: Spinor) -> Result<SpinorField> {
    let norm = spinor.norm_sqr();
    if !((norm - 1.0).abs() < UNIT_NORM_TOL) {
        return Err(Error::Normalization { norm });
    }
    Ok(SpinorField {
        grid: *grid,
        cells: vec![spinor; grid.len()],
        normalization: Normalization::PerCell,
    })
}

/// Pointwise `out(x, y) = U(x, y) in(x, y)`.
pub fn apply(map: &Su2Map, field: &SpinorField) -> Result<SpinorField> {
    apply_with(map, field, Execution::default())
}

pub fn apply_with(map: &Su2Map, field: &SpinorField, exec: Execution) -> Result<SpinorField> {
    map.check_grid(&field.grid)?;
    let grid = field.grid;
    let cells = par::map_indices(exec, grid.len(), |k| map.at_cell(&grid, k).apply(&field.cells[k]));
    if cells.iter().any(|s| !(s.up.is_finite() && s.down.is_finite())) {
        return Err(Error::Numerical("non-finite amplitude after operator application".into()));
    }
    Ok(SpinorField { grid, cells, normalization: field.normalization })
}

/// `sum_cells conj(a) . b * dA` over both spin components.
pub fn inner(a: &SpinorField, b: &SpinorField) -> Result<C64> {
    same_grid(&a.grid, &b.grid)?;
    let s: C64 = a.cells.iter().zip(&b.cells).map(|(p, q)| p.dot(q)).sum();
    Ok(s * a.grid.cell_area())
}
