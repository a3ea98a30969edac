//! Beamline elements and the field-to-period calibration.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{Normalization, SpinorField};
use crate::grid::Grid;
use crate::maps::IntensityMap;
use crate::su2::{unit_axis, LinearRotation, Spinor, Su2Map, C64};

/// Planck constant, J s (exact, SI 2019).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Neutron mass, kg (CODATA 2018).
pub const NEUTRON_MASS: f64 = 1.674_927_498_04e-27;
/// Neutron gyromagnetic ratio magnitude, rad s^-1 T^-1 (CODATA 2018).
pub const NEUTRON_GAMMA: f64 = 1.832_471_71e8;

/// `h / (m_n lambda)` in m/s.
pub fn velocity_from_wavelength(lambda_nm: f64) -> Result<f64> {
    if !(lambda_nm > 0.0 && lambda_nm.is_finite()) {
        return Err(Error::Config(format!("wavelength must be positive, got {lambda_nm} nm")));
    }
    Ok(PLANCK / (NEUTRON_MASS * lambda_nm * 1e-9))
}

/// Constants entering the prism phase gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    pub lambda_nm: f64,
    /// m/s
    pub velocity: f64,
    /// rad s^-1 T^-1
    pub gamma_n: f64,
    /// Prism incline angle, degrees.
    pub theta_deg: f64,
    /// Coil calibration, T/A.
    pub b_per_amp: f64,
}

impl PhysicsParams {
    pub const DEFAULT_LAMBDA_NM: f64 = 0.41;
    pub const DEFAULT_THETA_DEG: f64 = 60.0;
    /// 0.014 T at 10 A.
    pub const DEFAULT_B_PER_AMP: f64 = 0.0014;

    /// Defaults for the given wavelength with the velocity derived from it.
    pub fn for_wavelength(lambda_nm: f64) -> Result<Self> {
        Ok(PhysicsParams {
            lambda_nm,
            velocity: velocity_from_wavelength(lambda_nm)?,
            gamma_n: NEUTRON_GAMMA,
            theta_deg: Self::DEFAULT_THETA_DEG,
            b_per_amp: Self::DEFAULT_B_PER_AMP,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let expected = velocity_from_wavelength(self.lambda_nm)?;
        if !(self.velocity > 0.0 && self.velocity.is_finite()) {
            return Err(Error::Config(format!("velocity must be positive, got {} m/s", self.velocity)));
        }
        if ((self.velocity - expected) / expected).abs() > 1e-3 {
            return Err(Error::Config(format!(
                "velocity {} m/s inconsistent with wavelength {} nm (expected {expected:.2} m/s within 0.1%)",
                self.velocity, self.lambda_nm
            )));
        }
        if !(self.theta_deg > 0.0 && self.theta_deg < 90.0) {
            return Err(Error::Config(format!("theta must lie in (0, 90) deg, got {}", self.theta_deg)));
        }
        if !(self.gamma_n > 0.0 && self.gamma_n.is_finite()) {
            return Err(Error::Config(format!("gamma_n must be positive, got {}", self.gamma_n)));
        }
        if !self.b_per_amp.is_finite() {
            return Err(Error::Config("b_per_amp must be finite".into()));
        }
        Ok(())
    }

    /// Signed spin-rotation gradient `2 pi / a` in rad/mm for field `b_tesla`.
    pub fn phase_gradient(&self, b_tesla: f64) -> f64 {
        self.gamma_n * b_tesla * self.theta_deg.to_radians().tan() / self.velocity * 1e-3
    }
}

impl Default for PhysicsParams {
    fn default() -> Self {
        PhysicsParams::for_wavelength(Self::DEFAULT_LAMBDA_NM).expect("default wavelength is positive")
    }
}

/// Spin oscillation period `a = 2 pi v / (gamma |B| tan theta)` in mm.
pub fn period_from_physics(b_tesla: f64, params: &PhysicsParams) -> Result<f64> {
    if !(b_tesla > 0.0 && b_tesla.is_finite()) {
        return Err(Error::Domain(format!("period is undefined for field {b_tesla} T")));
    }
    Ok(2.0 * PI / params.phase_gradient(b_tesla))
}

/// Direction of a prism's phase ramp.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientAxis {
    /// Ramp along x, rotation about y.
    X,
    /// Ramp along y, rotation about x.
    Y,
}

impl fmt::Display for GradientAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradientAxis::X => "x",
            GradientAxis::Y => "y",
        })
    }
}

impl FromStr for GradientAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(GradientAxis::X),
            "y" | "Y" => Ok(GradientAxis::Y),
            _ => Err(Error::Config(format!("gradient axis must be `x` or `y`, got `{s}`"))),
        }
    }
}

/// Triangular-coil prism imprinting a linear spin-rotation ramp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LovPrism {
    pub axis: GradientAxis,
    /// A
    pub current: f64,
    /// Translation along the gradient direction, mm.
    pub offset: f64,
    /// Period in mm used instead of the coil calibration.
    pub period_override: Option<f64>,
}

impl LovPrism {
    pub fn new(axis: GradientAxis, current: f64) -> Self {
        LovPrism { axis, current, offset: 0.0, period_override: None }
    }

    pub fn with_period(axis: GradientAxis, period_mm: f64) -> Self {
        LovPrism { axis, current: 0.0, offset: 0.0, period_override: Some(period_mm) }
    }

    /// Signed gradient in rad/mm.
    pub fn gradient(&self, params: &PhysicsParams) -> Result<f64> {
        match self.period_override {
            Some(a) if a > 0.0 && a.is_finite() => Ok(2.0 * PI / a),
            Some(a) => Err(Error::Config(format!("period_override must be positive, got {a} mm"))),
            None if self.current.is_finite() => Ok(params.phase_gradient(self.current * params.b_per_amp)),
            None => Err(Error::Config(format!("prism current {} A is not finite", self.current))),
        }
    }

    /// Period in mm, if the prism is active.
    pub fn period(&self, params: &PhysicsParams) -> Result<Option<f64>> {
        let k = self.gradient(params)?;
        Ok((k != 0.0).then(|| 2.0 * PI / k.abs()))
    }
}

/// `exp(-i (pi/a)(y - offset) sigma_x)` for a y-ramp, and
/// `exp(-i (pi/a)(x - offset) sigma_y)` for an x-ramp.
pub fn lov_prism_map(prism: &LovPrism, params: &PhysicsParams) -> Result<Su2Map> {
    Ok(Su2Map::Linear(lov_prism_rotation(prism, params)?))
}

pub(crate) fn lov_prism_rotation(prism: &LovPrism, params: &PhysicsParams) -> Result<LinearRotation> {
    let k = prism.gradient(params)?;
    Ok(match prism.axis {
        GradientAxis::Y => LinearRotation {
            axis: [1.0, 0.0, 0.0],
            kx: 0.0,
            ky: k,
            x0: 0.0,
            y0: prism.offset,
            angle0: 0.0,
        },
        GradientAxis::X => LinearRotation {
            axis: [0.0, 1.0, 0.0],
            kx: k,
            ky: 0.0,
            x0: prism.offset,
            y0: 0.0,
            angle0: 0.0,
        },
    })
}

/// Uniform precession about a fixed axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuideRotation {
    pub axis: [f64; 3],
    pub angle_deg: f64,
}

/// Weak leftover field between prism pairs: a rotation whose angle varies
/// linearly across the beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualField {
    pub axis: [f64; 3],
    /// deg/mm along x
    pub gradient_x: f64,
    /// deg/mm along y
    pub gradient_y: f64,
    pub angle_deg: f64,
}

/// Rectangular transmission aperture centered on the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slit {
    pub width_x: f64,
    pub width_y: f64,
}

impl Slit {
    pub fn transmits(&self, x: f64, y: f64) -> bool {
        x.abs() <= self.width_x / 2.0 && y.abs() <= self.width_y / 2.0
    }
}

/// One of the six cardinal spin directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinDirection {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
    PlusZ,
    MinusZ,
}

impl SpinDirection {
    pub const ALL: [SpinDirection; 6] = [
        SpinDirection::PlusX,
        SpinDirection::MinusX,
        SpinDirection::PlusY,
        SpinDirection::MinusY,
        SpinDirection::PlusZ,
        SpinDirection::MinusZ,
    ];

    pub fn vector(self) -> [f64; 3] {
        match self {
            SpinDirection::PlusX => [1.0, 0.0, 0.0],
            SpinDirection::MinusX => [-1.0, 0.0, 0.0],
            SpinDirection::PlusY => [0.0, 1.0, 0.0],
            SpinDirection::MinusY => [0.0, -1.0, 0.0],
            SpinDirection::PlusZ => [0.0, 0.0, 1.0],
            SpinDirection::MinusZ => [0.0, 0.0, -1.0],
        }
    }

    pub fn opposite(self) -> SpinDirection {
        match self {
            SpinDirection::PlusX => SpinDirection::MinusX,
            SpinDirection::MinusX => SpinDirection::PlusX,
            SpinDirection::PlusY => SpinDirection::MinusY,
            SpinDirection::MinusY => SpinDirection::PlusY,
            SpinDirection::PlusZ => SpinDirection::MinusZ,
            SpinDirection::MinusZ => SpinDirection::PlusZ,
        }
    }

    /// The spin-up eigenstate along this direction.
    pub fn spinor(self) -> Spinor {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (up, down) = match self {
            SpinDirection::PlusZ => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
            SpinDirection::MinusZ => (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
            SpinDirection::PlusX => (C64::new(s, 0.0), C64::new(s, 0.0)),
            SpinDirection::MinusX => (C64::new(s, 0.0), C64::new(-s, 0.0)),
            SpinDirection::PlusY => (C64::new(s, 0.0), C64::new(0.0, s)),
            SpinDirection::MinusY => (C64::new(s, 0.0), C64::new(0.0, -s)),
        };
        Spinor { up, down }
    }

    /// Short label used in file names: `px`, `mz`, ...
    pub fn tag(self) -> &'static str {
        match self {
            SpinDirection::PlusX => "px",
            SpinDirection::MinusX => "mx",
            SpinDirection::PlusY => "py",
            SpinDirection::MinusY => "my",
            SpinDirection::PlusZ => "pz",
            SpinDirection::MinusZ => "mz",
        }
    }
}

impl fmt::Display for SpinDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinDirection::PlusX => "+x",
            SpinDirection::MinusX => "-x",
            SpinDirection::PlusY => "+y",
            SpinDirection::MinusY => "-y",
            SpinDirection::PlusZ => "+z",
            SpinDirection::MinusZ => "-z",
        })
    }
}

impl FromStr for SpinDirection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "+x" | "x" => SpinDirection::PlusX,
            "-x" => SpinDirection::MinusX,
            "+y" | "y" => SpinDirection::PlusY,
            "-y" => SpinDirection::MinusY,
            "+z" | "z" => SpinDirection::PlusZ,
            "-z" => SpinDirection::MinusZ,
            _ => {
                return Err(Error::Config(format!(
                    "spin direction must be one of +x, -x, +y, -y, +z, -z; got `{s}`"
                )))
            }
        })
    }
}

/// Spin analyzer with finite analyzing power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinFilter {
    pub direction: SpinDirection,
    pub analyzing_power: f64,
}

impl SpinFilter {
    pub const DEFAULT_ANALYZING_POWER: f64 = 0.94;

    pub fn new(direction: SpinDirection, analyzing_power: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&analyzing_power) {
            return Err(Error::Config(format!("analyzing power must lie in [0, 1], got {analyzing_power}")));
        }
        Ok(SpinFilter { direction, analyzing_power })
    }

    pub fn ideal(direction: SpinDirection) -> Self {
        SpinFilter { direction, analyzing_power: 1.0 }
    }

    /// `t+ |<n+|psi>|^2 + t- |<n-|psi>|^2`.
    pub fn transmission(&self, psi: &Spinor) -> f64 {
        let p = self.analyzing_power;
        let plus = self.direction.spinor().dot(psi).norm_sqr();
        let minus = self.direction.opposite().spinor().dot(psi).norm_sqr();
        0.5 * (1.0 + p) * plus + 0.5 * (1.0 - p) * minus
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    LovPrism(LovPrism),
    GuideRotation(GuideRotation),
    ResidualField(ResidualField),
    Slit(Slit),
    SpinFilter(SpinFilter),
}

impl ElementKind {
    pub fn name(&self) -> &'static str {
        match self {
            ElementKind::LovPrism(_) => "lov_prism",
            ElementKind::GuideRotation(_) => "guide_rotation",
            ElementKind::ResidualField(_) => "residual_field",
            ElementKind::Slit(_) => "slit",
            ElementKind::SpinFilter(_) => "spin_filter",
        }
    }
}

/// An element placed at `z` metres downstream of the source slit.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub label: Option<String>,
    pub z: f64,
    pub kind: ElementKind,
}

impl Element {
    pub fn new(z: f64, kind: ElementKind) -> Self {
        Element { label: None, z, kind }
    }

    pub fn labeled(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z.is_finite() && self.z >= 0.0) {
            return Err(Error::Config(format!("element z must be finite and >= 0 m, got {}", self.z)));
        }
        match &self.kind {
            ElementKind::LovPrism(p) => {
                p.gradient(&PhysicsParams::default())?;
                if !p.offset.is_finite() {
                    return Err(Error::Config("prism offset must be finite".into()));
                }
            }
            ElementKind::GuideRotation(g) => {
                unit_axis(g.axis)?;
                if !g.angle_deg.is_finite() {
                    return Err(Error::Config("guide rotation angle must be finite".into()));
                }
            }
            ElementKind::ResidualField(r) => {
                unit_axis(r.axis)?;
                if ![r.gradient_x, r.gradient_y, r.angle_deg].iter().all(|v| v.is_finite()) {
                    return Err(Error::Config("residual field parameters must be finite".into()));
                }
            }
            ElementKind::Slit(s) => {
                if !(s.width_x > 0.0 && s.width_y > 0.0) {
                    return Err(Error::Config(format!(
                        "slit widths must be positive, got ({}, {}) mm",
                        s.width_x, s.width_y
                    )));
                }
            }
            ElementKind::SpinFilter(f) => {
                SpinFilter::new(f.direction, f.analyzing_power)?;
            }
        }
        Ok(())
    }

    /// The spin rotation this element applies at a transverse point. Slits
    /// and filters act on weights, not on the spinor, and map to `None`.
    pub fn rotation(&self, params: &PhysicsParams) -> Result<Option<LinearRotation>> {
        Ok(match &self.kind {
            ElementKind::LovPrism(p) => Some(lov_prism_rotation(p, params)?),
            ElementKind::GuideRotation(g) => Some(LinearRotation::uniform(unit_axis(g.axis)?, g.angle_deg.to_radians())),
            ElementKind::ResidualField(r) => Some(LinearRotation {
                axis: unit_axis(r.axis)?,
                kx: r.gradient_x.to_radians(),
                ky: r.gradient_y.to_radians(),
                x0: 0.0,
                y0: 0.0,
                angle0: r.angle_deg.to_radians(),
            }),
            ElementKind::Slit(_) | ElementKind::SpinFilter(_) => None,
        })
    }

    pub fn map(&self, params: &PhysicsParams) -> Result<Su2Map> {
        Ok(self.rotation(params)?.map_or(Su2Map::Identity, Su2Map::Linear))
    }
}

/// `cos(pi r/a)|up> + i e^{-i phi} sin(pi r/a)|down>` at offset `(dx, dy)`
/// from the vortex center.
pub fn quadrupole_spinor(dx: f64, dy: f64, a_mm: f64) -> Spinor {
    let r = dx.hypot(dy);
    let phi = dy.atan2(dx);
    let t = PI * r / a_mm;
    Spinor {
        up: C64::new(t.cos(), 0.0),
        down: C64::new(0.0, 1.0) * C64::from_polar(t.sin(), -phi),
    }
}

/// The ideal quadrupole state about the grid center.
pub fn quadrupole_state(grid: &Grid, a_mm: f64) -> Result<SpinorField> {
    if !(a_mm > 0.0 && a_mm.is_finite()) {
        return Err(Error::Domain(format!("period must be positive, got {a_mm} mm")));
    }
    let cells = (0..grid.len())
        .map(|k| {
            let (x, y) = grid.coords(k);
            quadrupole_spinor(x, y, a_mm)
        })
        .collect();
    SpinorField::from_cells(*grid, cells, Normalization::PerCell)
}

/// A statistical mixture of pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub members: Vec<(f64, SpinorField)>,
}

impl Ensemble {
    pub fn pure(field: SpinorField) -> Self {
        Ensemble { members: vec![(1.0, field)] }
    }
}

/// Initial pure states and weights for a polarizer with beam polarization `p`.
pub fn polarizer_members(direction: SpinDirection, p: f64) -> Result<Vec<(f64, Spinor)>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("neutron polarization must lie in [0, 1], got {p}")));
    }
    let mut members = vec![(0.5 * (1.0 + p), direction.spinor())];
    if p < 1.0 {
        members.push((0.5 * (1.0 - p), direction.opposite().spinor()));
    }
    Ok(members)
}

pub fn polarizer_ensemble(grid: &Grid, direction: SpinDirection, p: f64) -> Result<Ensemble> {
    let members = polarizer_members(direction, p)?
        .into_iter()
        .map(|(w, s)| Ok((w, crate::field::uniform_state(grid, s)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble { members })
}

/// Weighted analyzer transmission summed over ensemble members.
pub fn spin_filter(ensemble: &Ensemble, filter: &SpinFilter) -> Result<IntensityMap> {
    SpinFilter::new(filter.direction, filter.analyzing_power)?;
    let Some((_, first)) = ensemble.members.first() else {
        return Err(Error::Config("empty ensemble".into()));
    };
    let grid = *first.grid();
    let mut values = vec![0.0; grid.len()];
    for (w, field) in &ensemble.members {
        crate::field::same_grid(&grid, field.grid())?;
        for (v, s) in values.iter_mut().zip(field.cells()) {
            *v += w * filter.transmission(s);
        }
    }
    IntensityMap::new(grid, values)
}
