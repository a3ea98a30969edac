//! Simulation of polarized spin-1/2 beams through magnetic prism beamlines.
//!
//! The crate is organised bottom-up:
//!
//! - [`grid`], [`su2`], [`field`]: transverse sampling, spinors and
//!   pointwise SU(2) action.
//! - [`elements`]: prisms, guide rotations, residual fields, slits and spin
//!   filters, plus the field-to-period calibration.
//! - [`beamline`]: source sampling, ray transport, Monte Carlo camera
//!   images, and coil-current optimization.
//! - [`analysis`]: phase maps, winding numbers, OAM spectra, lattice period,
//!   visibility, contrast and quadrupole fidelity.
//! - [`config`] and [`image`]: the TOML beamline format and graymap output.

pub mod analysis;
pub mod beamline;
pub mod config;
pub mod elements;
pub mod error;
pub mod field;
pub mod grid;
pub mod image;
pub mod maps;
pub mod par;
pub mod run;
pub mod su2;

pub use error::{Error, Result};
pub use field::{apply, inner, uniform_state, Normalization, SpinorField};
pub use grid::{make_grid, Grid};
pub use maps::{IntensityMap, PhaseMap};
pub use par::Execution;
pub use su2::{Component, Spinor, Su2, Su2Map, C64};
