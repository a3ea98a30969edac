//! Observables computed from spinor fields and camera images.

mod fidelity;
mod oam;
mod period;
mod phase;
mod visibility;
mod vortex;

pub use crate::elements::GradientAxis as Axis;
pub use crate::maps::{IntensityMap, PhaseMap};
pub use fidelity::{quadrupole_fidelity, quadrupole_overlap, QuadrupoleOverlap};
pub use oam::{oam_spectrum, OamSpectrum};
pub use period::{lattice_period, LatticePeriod};
pub use phase::{phase_difference_map, AMPLITUDE_FLOOR};
pub use visibility::{azimuthal_harmonics, correlation, lattice_contrast, fringe_fit, visibility, FringeFit};
pub use vortex::{
    find_zeros, locate_zero, vortex_census, winding_number, winding_number_with, Vortex, DEFAULT_LOOP_SAMPLES,
};
