//! Two-component spinors and SU(2) rotations.
//!
//! A rotation by `angle` about the unit axis `n` is the unitary
//! `exp(-i angle/2 n.sigma) = cos(angle/2) I - i sin(angle/2) n.sigma`,
//! stored in Cayley-Klein form `[[a, -b*], [b, a*]]` so the determinant
//! `|a|^2 + |b|^2` is one by construction.

use num_complex::Complex64;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::grid::Grid;

pub type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for algebraic identities on double-precision spinor data.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// z-basis spinor `up |up_z> + down |down_z>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub up: C64,
    pub down: C64,
}

impl Spinor {
    pub const UP: Spinor = Spinor { up: C64::new(1.0, 0.0), down: C64::new(0.0, 0.0) };
    pub const DOWN: Spinor = Spinor { up: C64::new(0.0, 0.0), down: C64::new(1.0, 0.0) };

    pub fn new(up: C64, down: C64) -> Self {
        Spinor { up, down }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    /// Spin-up eigenstate along the unit vector `n`.
    pub fn along(n: [f64; 3]) -> Spinor {
        let [x, y, z] = normalize(n);
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        Spinor {
            up: C64::new((theta / 2.0).cos(), 0.0),
            down: C64::from_polar((theta / 2.0).sin(), phi),
        }
    }

    /// `<self|other>`.
    pub fn dot(&self, other: &Spinor) -> C64 {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    pub fn scale(&self, s: C64) -> Spinor {
        Spinor { up: self.up * s, down: self.down * s }
    }

    /// Component by spin label.
    pub fn component(&self, c: Component) -> C64 {
        match c {
            Component::Up => self.up,
            Component::Down => self.down,
        }
    }

    /// Bloch vector `<sigma>`; unit length for a unit spinor.
    pub fn bloch(&self) -> [f64; 3] {
        let ud = self.up.conj() * self.down;
        [2.0 * ud.re, 2.0 * ud.im, self.up.norm_sqr() - self.down.norm_sqr()]
    }
}

/// Selects one z-basis component of a spinor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Up,
    Down,
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Component::Up => "up",
            Component::Down => "down",
        })
    }
}

pub(crate) fn normalize(n: [f64; 3]) -> [f64; 3] {
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    [n[0] / len, n[1] / len, n[2] / len]
}

/// Checks that `n` can serve as a rotation axis and returns it normalized.
pub fn unit_axis(n: [f64; 3]) -> Result<[f64; 3]> {
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if !(len.is_finite() && len > 1e-12) {
        return Err(Error::Config(format!("rotation axis {n:?} has no direction")));
    }
    Ok([n[0] / len, n[1] / len, n[2] / len])
}

/// An element of SU(2) as `[[a, -conj(b)], [b, conj(a)]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2 {
    pub a: C64,
    pub b: C64,
}

impl Su2 {
    pub const IDENTITY: Su2 = Su2 { a: C64::new(1.0, 0.0), b: C64::new(0.0, 0.0) };

    /// Rotation by `angle` radians about the unit vector `axis`.
    pub fn rotation(axis: [f64; 3], angle: f64) -> Su2 {
        let (s, c) = (angle / 2.0).sin_cos();
        let [nx, ny, nz] = axis;
        Su2 { a: C64::new(c, -s * nz), b: C64::new(s * ny, -s * nx) }
    }

    pub fn matrix(&self) -> [[C64; 2]; 2] {
        [[self.a, -self.b.conj()], [self.b, self.a.conj()]]
    }

    pub fn det(&self) -> C64 {
        let m = self.matrix();
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn dagger(&self) -> Su2 {
        Su2 { a: self.a.conj(), b: -self.b }
    }

    /// Largest entry of `|U^dagger U - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let m = self.matrix();
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..2 {
                    s += m[k][r].conj() * m[k][c];
                }
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    pub fn apply(&self, s: &Spinor) -> Spinor {
        Spinor {
            up: self.a * s.up - self.b.conj() * s.down,
            down: self.b * s.up + self.a.conj() * s.down,
        }
    }
}

impl Mul for Su2 {
    type Output = Su2;

    /// Matrix product; `(p * q)` applies `q` first.
    fn mul(self, q: Su2) -> Su2 {
        Su2 {
            a: self.a * q.a - self.b.conj() * q.b,
            b: self.b * q.a + self.a.conj() * q.b,
        }
    }
}

impl Mul<Spinor> for Su2 {
    type Output = Spinor;
    fn mul(self, s: Spinor) -> Spinor {
        self.apply(&s)
    }
}

/// Rotation about a fixed axis whose angle is affine in the transverse
/// position: `angle(x, y) = kx (x - x0) + ky (y - y0) + angle0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearRotation {
    pub axis: [f64; 3],
    /// rad/mm
    pub kx: f64,
    /// rad/mm
    pub ky: f64,
    /// Reference point (mm) where the ramp contributes no angle.
    pub x0: f64,
    pub y0: f64,
    pub angle0: f64,
}

impl LinearRotation {
    /// Uniform rotation.
    pub fn uniform(axis: [f64; 3], angle: f64) -> Self {
        LinearRotation { axis, kx: 0.0, ky: 0.0, x0: 0.0, y0: 0.0, angle0: angle }
    }

    pub fn angle(&self, x: f64, y: f64) -> f64 {
        self.kx * (x - self.x0) + self.ky * (y - self.y0) + self.angle0
    }

    pub fn at(&self, x: f64, y: f64) -> Su2 {
        Su2::rotation(self.axis, self.angle(x, y))
    }
}

/// A position-dependent SU(2) operator on the transverse plane.
#[derive(Debug, Clone, PartialEq)]
pub enum Su2Map {
    Identity,
    Linear(LinearRotation),
    /// Maps applied left to right: the first entry acts first.
    Sequence(Vec<Su2Map>),
    Materialized { grid: Grid, cells: Vec<Su2> },
}

impl Su2Map {
    /// Evaluates a lazy map at a point. Materialized maps answer with the
    /// nearest cell and `None` outside their grid.
    pub fn at(&self, x: f64, y: f64) -> Option<Su2> {
        match self {
            Su2Map::Identity => Some(Su2::IDENTITY),
            Su2Map::Linear(r) => Some(r.at(x, y)),
            Su2Map::Sequence(maps) => {
                let mut u = Su2::IDENTITY;
                for m in maps {
                    u = m.at(x, y)? * u;
                }
                Some(u)
            }
            Su2Map::Materialized { grid, cells } => grid.bin(x, y).map(|k| cells[k]),
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        match self {
            Su2Map::Materialized { grid, .. } => Some(grid),
            Su2Map::Sequence(maps) => maps.iter().find_map(|m| m.grid()),
            _ => None,
        }
    }

    /// The operator at cell `k` of `grid`. Callers check grid compatibility.
    pub(crate) fn at_cell(&self, grid: &Grid, k: usize) -> Su2 {
        match self {
            Su2Map::Identity => Su2::IDENTITY,
            Su2Map::Linear(r) => {
                let (x, y) = grid.coords(k);
                r.at(x, y)
            }
            Su2Map::Sequence(maps) => maps
                .iter()
                .fold(Su2::IDENTITY, |u, m| m.at_cell(grid, k) * u),
            Su2Map::Materialized { cells, .. } => cells[k],
        }
    }

    pub fn materialize(&self, grid: &Grid) -> Result<Su2Map> {
        self.check_grid(grid)?;
        let cells = (0..grid.len()).map(|k| self.at_cell(grid, k)).collect();
        Ok(Su2Map::Materialized { grid: *grid, cells })
    }

    /// `then` applied after `self`.
    pub fn then(self, then: Su2Map) -> Su2Map {
        match self {
            Su2Map::Sequence(mut v) => {
                v.push(then);
                Su2Map::Sequence(v)
            }
            first => Su2Map::Sequence(vec![first, then]),
        }
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<()> {
        match self {
            Su2Map::Materialized { grid: g, .. } if g != grid => Err(Error::Shape(format!(
                "map grid {}x{} does not match field grid {}x{}",
                g.nx(),
                g.ny(),
                grid.nx(),
                grid.ny()
            ))),
            Su2Map::Sequence(maps) => maps.iter().try_for_each(|m| m.check_grid(grid)),
            _ => Ok(()),
        }
    }
}

/// Pauli-vector helpers used by tests and reference computations.
pub fn pauli_exp(axis: [f64; 3], half_angle: f64) -> [[C64; 2]; 2] {
    // exp(-i t n.sigma) written out component by component
    let (s, c) = half_angle.sin_cos();
    let [nx, ny, nz] = axis;
    [
        [C64::new(c, 0.0) - I * s * nz, -I * s * C64::new(nx, -ny)],
        [-I * s * C64::new(nx, ny), C64::new(c, 0.0) + I * s * nz],
    ]
}
