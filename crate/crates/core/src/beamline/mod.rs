//! Source sampling, element composition and camera transport.

mod optimize;
mod simulate;
mod source;
mod trace;

pub use optimize::{
    coordinate_descent, golden_section_max, optimize_currents, CurrentOptimization, DescentOptions,
    DescentResult, LineSearch, Objective, OptimizeOptions,
};
pub use simulate::{simulate, simulate_with, Diagnostics, FilteredImage, SimulateOptions, Simulation};
pub use source::{sample_rays, AngularDistribution, SourceModel};
pub use trace::{trace_ray, PreparedBeamline, RayState};

use crate::elements::{ElementKind, Element, GradientAxis, LovPrism, PhysicsParams, SpinDirection, SpinFilter};
use crate::error::{Error, Result};
use crate::field::{Normalization, SpinorField};
use crate::grid::Grid;
use crate::su2::{Spinor, Su2};

/// Detector plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub grid: Grid,
    /// m downstream of the source slit.
    pub z: f64,
}

/// Full description of one beamline run.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamlineConfig {
    pub source: SourceModel,
    pub physics: PhysicsParams,
    /// Elements in beam order.
    pub elements: Vec<Element>,
    pub camera: Camera,
    /// Beam polarization after the polarizer.
    pub polarization: f64,
    /// Polarizer direction.
    pub initial_direction: SpinDirection,
}

impl BeamlineConfig {
    pub fn validate(&self) -> Result<()> {
        self.physics.validate()?;
        self.source.validate()?;
        if !(0.0..=1.0).contains(&self.polarization) {
            return Err(Error::Config(format!(
                "neutron polarization must lie in [0, 1], got {}",
                self.polarization
            )));
        }
        for e in &self.elements {
            e.validate()?;
        }
        for w in self.elements.windows(2) {
            if !(w[1].z > w[0].z) {
                return Err(Error::Config(format!(
                    "element z positions must be strictly increasing: {} m ({}) is followed by {} m ({})",
                    w[0].z,
                    w[0].kind.name(),
                    w[1].z,
                    w[1].kind.name()
                )));
            }
        }
        let filters = self.elements.iter().filter(|e| matches!(e.kind, ElementKind::SpinFilter(_))).count();
        if filters > 1 {
            return Err(Error::Config(format!("at most one spin filter (the analyzer) is allowed, found {filters}")));
        }
        if filters == 1 && !matches!(self.elements.last().map(|e| &e.kind), Some(ElementKind::SpinFilter(_))) {
            return Err(Error::Config("the spin filter must be the last element (analyzer)".into()));
        }
        if let Some(last) = self.elements.last() {
            if self.camera.z < last.z {
                return Err(Error::Config(format!(
                    "camera at {} m lies upstream of the last element at {} m",
                    self.camera.z, last.z
                )));
            }
        }
        if !(self.camera.z.is_finite() && self.camera.z >= 0.0) {
            return Err(Error::Config(format!("camera z must be >= 0 m, got {}", self.camera.z)));
        }
        Ok(())
    }

    pub fn analyzer(&self) -> Option<SpinFilter> {
        self.elements.iter().find_map(|e| match e.kind {
            ElementKind::SpinFilter(f) => Some(f),
            _ => None,
        })
    }

    pub fn prisms(&self) -> impl Iterator<Item = &LovPrism> {
        self.elements.iter().filter_map(|e| match &e.kind {
            ElementKind::LovPrism(p) => Some(p),
            _ => None,
        })
    }

    pub fn prisms_mut(&mut self) -> impl Iterator<Item = &mut LovPrism> {
        self.elements.iter_mut().filter_map(|e| match &mut e.kind {
            ElementKind::LovPrism(p) => Some(p),
            _ => None,
        })
    }

    pub fn currents(&self) -> Vec<f64> {
        self.prisms().map(|p| p.current).collect()
    }

    pub fn set_currents(&mut self, currents: &[f64]) -> Result<()> {
        let n = self.prisms().count();
        if currents.len() != n {
            return Err(Error::Config(format!("{} currents given for {n} prisms", currents.len())));
        }
        for (p, c) in self.prisms_mut().zip(currents) {
            p.current = *c;
        }
        Ok(())
    }

    /// Smallest period among active prisms, in mm.
    pub fn nominal_period(&self) -> Result<Option<f64>> {
        let mut best: Option<f64> = None;
        for p in self.prisms() {
            if let Some(a) = p.period(&self.physics)? {
                best = Some(best.map_or(a, |b: f64| b.min(a)));
            }
        }
        Ok(best)
    }

    pub fn max_divergence(&self) -> f64 {
        self.source.divergence_fwhm_x.max(self.source.divergence_fwhm_y)
    }

    /// Number of active prism pairs: y-ramp followed by x-ramp.
    pub fn active_prisms(&self) -> usize {
        self.prisms().filter(|p| p.period(&self.physics).ok().flatten().is_some()).count()
    }
}

/// Lower bound on the transverse coherence length at the first prism,
/// `lambda L1 / s`, in micrometres.
pub fn coherence_sigma(lambda_nm: f64, l1_m: f64, slit_mm: f64) -> Result<f64> {
    if !(slit_mm > 0.0) {
        return Err(Error::Domain(format!("slit width must be positive, got {slit_mm} mm")));
    }
    if !(lambda_nm > 0.0 && l1_m > 0.0) {
        return Err(Error::Domain(format!(
            "wavelength and distance must be positive, got {lambda_nm} nm, {l1_m} m"
        )));
    }
    // nm * m / mm = 1e-9 * 1e3 m = 1e-6 m
    Ok(lambda_nm * l1_m / slit_mm)
}

/// The aligned, divergence-free state after `n_pairs` prism pairs of period
/// `a_mm` acting on `|up_z>`: `(U_x U_y)^N |up_z>`.
pub fn ideal_lov_state(grid: &Grid, a_mm: f64, n_pairs: usize) -> Result<SpinorField> {
    if !(a_mm > 0.0 && a_mm.is_finite()) {
        return Err(Error::Domain(format!("period must be positive, got {a_mm} mm")));
    }
    let params = PhysicsParams::default();
    let uy = crate::elements::lov_prism_rotation(&LovPrism::with_period(GradientAxis::Y, a_mm), &params)?;
    let ux = crate::elements::lov_prism_rotation(&LovPrism::with_period(GradientAxis::X, a_mm), &params)?;
    let cells = (0..grid.len())
        .map(|k| {
            let (x, y) = grid.coords(k);
            let pair = ux.at(x, y) * uy.at(x, y);
            let mut u = Su2::IDENTITY;
            for _ in 0..n_pairs {
                u = pair * u;
            }
            u.apply(&Spinor::UP)
        })
        .collect();
    SpinorField::from_cells(*grid, cells, Normalization::PerCell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn coherence_numbers() {
        assert!((coherence_sigma(0.41, 0.965, 1.0).unwrap() - 0.396).abs() < 0.001);
        assert!((coherence_sigma(0.41, 1.93, 1.0).unwrap() - 0.791).abs() < 0.001);
        assert!((coherence_sigma(0.41, 0.965, 2.0).unwrap() - 0.198).abs() < 0.001);
        assert!(matches!(coherence_sigma(0.41, 0.965, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_pairs_is_input_state() {
        let g = make_grid(4.0, 4.0, 0.5).unwrap();
        let f = ideal_lov_state(&g, 3.0, 0).unwrap();
        assert!(f.cells().iter().all(|c| *c == Spinor::UP));
    }

    #[test]
    fn one_pair_matches_closed_form() {
        let a = 3.82;
        let g = make_grid(25.0, 25.0, 0.1).unwrap();
        let f = ideal_lov_state(&g, a, 1).unwrap();
        for (k, c) in f.cells().iter().enumerate() {
            let (x, y) = g.coords(k);
            let (sx, cx) = (PI * x / a).sin_cos();
            let (sy, cy) = (PI * y / a).sin_cos();
            let expected = sy * sy * cx * cx + cy * cy * sx * sx;
            assert!((c.down.norm_sqr() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn two_pairs_form_rings() {
        let a = 5.0;
        let g = make_grid(10.0, 10.0, 0.05).unwrap();
        let f = ideal_lov_state(&g, a, 2).unwrap();
        // |down|^2 ~ (2 pi r / a)^2 near the cell center
        for r in [0.05f64, 0.1, 0.2] {
            let i = g.index_x(r - 0.025).unwrap();
            let j = g.index_y(0.025).unwrap();
            let (x, y) = (g.x(i), g.y(j));
            let rr = x.hypot(y);
            let got = f.at(i, j).down.norm_sqr();
            let lead = (2.0 * PI * rr / a).powi(2);
            assert!((got / lead - 1.0).abs() < 0.05, "r={rr} {got} {lead}");
        }
    }
}
