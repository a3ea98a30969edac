use std::f64::consts::PI;

use super::vortex::amplitude_at;
use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::su2::{Component, C64};

const RING_SAMPLES: usize = 128;
const MIN_SAMPLES_AT_HALF_RADIUS: f64 = 16.0;

/// Azimuthal-harmonic weights of one component about a point.
#[derive(Debug, Clone, PartialEq)]
pub struct OamSpectrum {
    pub cell_center: (f64, f64),
    pub component: Component,
    pub radius: f64,
    /// `(l, weight)` for `l` in `-L..=L`; weights sum to one.
    pub weights: Vec<(i32, f64)>,
}

impl OamSpectrum {
    pub fn weight(&self, l: i32) -> f64 {
        self.weights.iter().find(|w| w.0 == l).map_or(0.0, |w| w.1)
    }

    /// Index with the largest weight (lowest `l` on ties).
    pub fn dominant(&self) -> i32 {
        self.weights
            .iter()
            .fold((0, f64::NEG_INFINITY), |best, w| if w.1 > best.1 { *w } else { best })
            .0
    }
}

/// Weight per OAM index `l`:
/// `int_0^R |(1/2pi) oint psi(r, phi) e^{-i l phi} dphi|^2 r dr`,
/// from a discrete Fourier transform on bilinearly interpolated rings.
pub fn oam_spectrum(
    field: &SpinorField,
    cell_center: (f64, f64),
    component: Component,
    radius: f64,
    max_l: usize,
) -> Result<OamSpectrum> {
    if max_l < 2 {
        return Err(Error::Domain(format!("OAM range must reach at least |l| = 2, got {max_l}")));
    }
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("integration radius must be positive, got {radius} mm")));
    }
    let g = field.grid();
    let pitch = g.dx().max(g.dy());
    if PI * radius / pitch < MIN_SAMPLES_AT_HALF_RADIUS {
        return Err(Error::Resolution(format!(
            "radius {radius} mm resolves {:.1} cells around the half-radius circle; need {MIN_SAMPLES_AT_HALF_RADIUS}",
            PI * radius / pitch
        )));
    }
    let rings = ((2.0 * radius / pitch).ceil() as usize).max(8);
    let dr = radius / rings as f64;
    let ls: Vec<i32> = (-(max_l as i32)..=max_l as i32).collect();
    let mut acc = vec![0.0; ls.len()];
    let mut samples = vec![C64::new(0.0, 0.0); RING_SAMPLES];
    for ring in 0..rings {
        let r = (ring as f64 + 0.5) * dr;
        for (m, s) in samples.iter_mut().enumerate() {
            let phi = 2.0 * PI * m as f64 / RING_SAMPLES as f64;
            let (x, y) = (cell_center.0 + r * phi.cos(), cell_center.1 + r * phi.sin());
            *s = amplitude_at(field, component, x, y)
                .ok_or_else(|| Error::Resolution(format!("ring point ({x:.3}, {y:.3}) mm lies outside the grid")))?;
        }
        for (w, l) in acc.iter_mut().zip(&ls) {
            let c: C64 = samples
                .iter()
                .enumerate()
                .map(|(m, s)| s * C64::from_polar(1.0, -(*l as f64) * 2.0 * PI * m as f64 / RING_SAMPLES as f64))
                .sum::<C64>()
                / RING_SAMPLES as f64;
            *w += c.norm_sqr() * r * dr;
        }
    }
    let total: f64 = acc.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Numerical(format!("{component} component vanishes inside the integration disk")));
    }
    Ok(OamSpectrum {
        cell_center,
        component,
        radius,
        weights: ls.into_iter().zip(acc).map(|(l, w)| (l, w / total)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::quadrupole_state;
    use crate::grid::make_grid;

    #[test]
    fn quadrupole_components_are_single_harmonics() {
        let a = 5.0;
        let f = quadrupole_state(&make_grid(25.0, 25.0, 0.1).unwrap(), a).unwrap();
        let down = oam_spectrum(&f, (0.0, 0.0), Component::Down, a / 4.0, 3).unwrap();
        assert!(down.weight(-1) >= 0.99, "{:?}", down.weights);
        assert_eq!(down.dominant(), -1);
        let up = oam_spectrum(&f, (0.0, 0.0), Component::Up, a / 4.0, 3).unwrap();
        assert!(up.weight(0) >= 0.99);
        let sum: f64 = down.weights.iter().map(|w| w.1).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn global_phase_does_not_change_weights() {
        let a = 5.0;
        let f = crate::beamline::ideal_lov_state(&make_grid(12.0, 12.0, 0.1).unwrap(), a, 2).unwrap();
        let s0 = oam_spectrum(&f, (0.0, 0.0), Component::Down, a / 8.0, 4).unwrap();
        let s1 = oam_spectrum(&f.with_global_phase(1.1), (0.0, 0.0), Component::Down, a / 8.0, 4).unwrap();
        for (p, q) in s0.weights.iter().zip(&s1.weights) {
            assert!((p.1 - q.1).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let f = quadrupole_state(&make_grid(25.0, 25.0, 0.5).unwrap(), 5.0).unwrap();
        assert!(matches!(oam_spectrum(&f, (0.0, 0.0), Component::Down, 0.625, 3), Err(Error::Resolution(_))));
        assert!(matches!(oam_spectrum(&f, (0.0, 0.0), Component::Down, 2.5, 1), Err(Error::Domain(_))));
    }
}
