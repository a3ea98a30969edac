use super::BeamlineConfig;
use crate::elements::{ElementKind, Slit};
use crate::error::Result;
use crate::su2::{LinearRotation, Spinor, Su2};

/// A ray at some z-plane: transverse position (mm), direction slopes
/// `dx/dz`, `dy/dz`, the spinor it carries, and its weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayState {
    pub x: f64,
    pub y: f64,
    pub slope_x: f64,
    pub slope_y: f64,
    pub spinor: Spinor,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy)]
enum Action {
    Rotate(LinearRotation),
    Aperture(Slit),
}

/// A validated beamline reduced to the per-plane operations a ray meets.
#[derive(Debug, Clone)]
pub struct PreparedBeamline {
    steps: Vec<(f64, Action)>,
    camera_z: f64,
}

impl PreparedBeamline {
    pub fn new(config: &BeamlineConfig) -> Result<Self> {
        config.validate()?;
        let mut steps = Vec::with_capacity(config.elements.len());
        for e in &config.elements {
            match &e.kind {
                ElementKind::Slit(s) => steps.push((e.z, Action::Aperture(*s))),
                // the analyzer acts at intensity level on the camera
                ElementKind::SpinFilter(_) => {}
                _ => {
                    if let Some(r) = e.rotation(&config.physics)? {
                        steps.push((e.z, Action::Rotate(r)));
                    }
                }
            }
        }
        Ok(PreparedBeamline { steps, camera_z: config.camera.z })
    }

    /// Straight-line transport from the slit plane to the camera. Returns the
    /// camera position and the accumulated unitary, or `None` when an
    /// aperture blocks the ray.
    pub fn propagate(&self, x: f64, y: f64, slope_x: f64, slope_y: f64) -> Option<(f64, f64, Su2)> {
        let mut u = Su2::IDENTITY;
        let mut z = 0.0;
        let (mut x, mut y) = (x, y);
        for (zk, action) in &self.steps {
            let dz_mm = (zk - z) * 1e3;
            x += slope_x * dz_mm;
            y += slope_y * dz_mm;
            z = *zk;
            match action {
                Action::Rotate(r) => u = r.at(x, y) * u,
                Action::Aperture(s) => {
                    if !s.transmits(x, y) {
                        return None;
                    }
                }
            }
        }
        let dz_mm = (self.camera_z - z) * 1e3;
        Some((x + slope_x * dz_mm, y + slope_y * dz_mm, u))
    }

    /// Unitary seen by a ray that is parallel to the axis at `(x, y)`.
    pub fn parallel_unitary(&self, x: f64, y: f64) -> Su2 {
        self.steps.iter().fold(Su2::IDENTITY, |u, (_, a)| match a {
            Action::Rotate(r) => r.at(x, y) * u,
            Action::Aperture(_) => u,
        })
    }
}

/// Carries `ray` from the slit plane to the camera. A blocked ray arrives
/// with zero weight.
pub fn trace_ray(ray: &RayState, config: &BeamlineConfig) -> Result<RayState> {
    let line = PreparedBeamline::new(config)?;
    Ok(match line.propagate(ray.x, ray.y, ray.slope_x, ray.slope_y) {
        Some((x, y, u)) => RayState { x, y, spinor: u.apply(&ray.spinor), ..*ray },
        None => {
            let dz = config.camera.z * 1e3;
            RayState { x: ray.x + ray.slope_x * dz, y: ray.y + ray.slope_y * dz, weight: 0.0, ..*ray }
        }
    })
}
