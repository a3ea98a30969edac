use crate::elements::quadrupole_spinor;
use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::su2::C64;

/// Normalized overlaps of a field with the quadrupole state on a disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrupoleOverlap {
    /// `|<Q|psi>|^2 / (<psi|psi> <Q|Q>)`.
    pub raw: f64,
    /// As `raw` after freeing the relative phase between the two spin
    /// components, which a uniform rotation about z supplies.
    pub aligned: f64,
    /// Disk cells integrated.
    pub cells: usize,
}

pub fn quadrupole_overlap(field: &SpinorField, cell_center: (f64, f64), a_mm: f64, radius: f64) -> Result<QuadrupoleOverlap> {
    if !(a_mm > 0.0 && a_mm.is_finite()) {
        return Err(Error::Domain(format!("period must be positive, got {a_mm} mm")));
    }
    if !(radius > 0.0 && radius <= a_mm / 4.0) {
        return Err(Error::Domain(format!("radius {radius} mm must lie in (0, a/4 = {} mm]", a_mm / 4.0)));
    }
    let g = field.grid();
    let (mut up, mut down) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let (mut npsi, mut nq, mut cells) = (0.0, 0.0, 0usize);
    for (k, psi) in field.cells().iter().enumerate() {
        let (x, y) = g.coords(k);
        let (dx, dy) = (x - cell_center.0, y - cell_center.1);
        if dx * dx + dy * dy > radius * radius {
            continue;
        }
        let q = quadrupole_spinor(dx, dy, a_mm);
        up += q.up.conj() * psi.up;
        down += q.down.conj() * psi.down;
        npsi += psi.norm_sqr();
        nq += q.norm_sqr();
        cells += 1;
    }
    if cells == 0 {
        return Err(Error::Resolution(format!(
            "disk of radius {radius} mm about ({}, {}) contains no cells",
            cell_center.0, cell_center.1
        )));
    }
    let norm = npsi * nq;
    if !(norm > 0.0) {
        return Err(Error::Numerical("field vanishes on the disk".into()));
    }
    Ok(QuadrupoleOverlap {
        raw: ((up + down).norm_sqr() / norm).min(1.0),
        aligned: ((up.norm() + down.norm()).powi(2) / norm).min(1.0),
        cells,
    })
}

/// Quadrupole fidelity in `[0, 1]`, up to the relative spin phase.
pub fn quadrupole_fidelity(field: &SpinorField, cell_center: (f64, f64), a_mm: f64, radius: f64) -> Result<f64> {
    quadrupole_overlap(field, cell_center, a_mm, radius).map(|o| o.aligned)
}
