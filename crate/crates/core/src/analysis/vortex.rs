//! Phase singularities of single spinor components.

use std::f64::consts::PI;

use super::phase::AMPLITUDE_FLOOR;
use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::maps::bilinear;
use crate::su2::{Component, C64};

pub const DEFAULT_LOOP_SAMPLES: usize = 128;
const MIN_LOOP_SAMPLES: usize = 64;
/// Largest tolerated distance of the loop integral from an integer.
const ROUNDING_GUARD: f64 = 0.1;

/// Interpolated component amplitude at `(x, y)`.
pub(crate) fn amplitude_at(field: &SpinorField, c: Component, x: f64, y: f64) -> Option<C64> {
    let cells = field.cells();
    bilinear(field.grid(), x, y, |k| cells[k].component(c))
}

/// Winding number of one component around a circle, with the default
/// sample count.
pub fn winding_number(field: &SpinorField, component: Component, center: (f64, f64), radius: f64) -> Result<i32> {
    winding_number_with(field, component, center, radius, DEFAULT_LOOP_SAMPLES)
}

pub fn winding_number_with(
    field: &SpinorField,
    component: Component,
    center: (f64, f64),
    radius: f64,
    samples: usize,
) -> Result<i32> {
    if samples < MIN_LOOP_SAMPLES {
        return Err(Error::Resolution(format!("winding loop needs at least {MIN_LOOP_SAMPLES} samples")));
    }
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("loop radius must be positive, got {radius} mm")));
    }
    let mut points = Vec::with_capacity(samples);
    for m in 0..samples {
        let t = 2.0 * PI * m as f64 / samples as f64;
        let (x, y) = (center.0 + radius * t.cos(), center.1 + radius * t.sin());
        let v = amplitude_at(field, component, x, y)
            .ok_or_else(|| Error::Resolution(format!("loop point ({x:.3}, {y:.3}) mm lies outside the grid")))?;
        if v.norm() < AMPLITUDE_FLOOR {
            return Err(Error::IllConditioned(format!(
                "{component} amplitude {:.2e} at ({x:.3}, {y:.3}) mm on the loop",
                v.norm()
            )));
        }
        points.push(v);
    }
    let total: f64 = (0..samples).map(|m| (points[(m + 1) % samples] * points[m].conj()).arg()).sum();
    let w = total / (2.0 * PI);
    let rounded = w.round();
    if (w - rounded).abs() >= ROUNDING_GUARD {
        return Err(Error::IllConditioned(format!("loop integral {w:.3} is not close to an integer")));
    }
    Ok(rounded as i32)
}

/// Refines an amplitude zero of `component` near `seed`: the smallest
/// `|psi|^2` cell within `search_radius`, then one Newton step on a local
/// quadratic model of `|psi|^2`.
pub fn locate_zero(field: &SpinorField, component: Component, seed: (f64, f64), search_radius: f64) -> Result<(f64, f64)> {
    let g = field.grid();
    let mut best: Option<(usize, usize, f64)> = None;
    for j in 0..g.ny() {
        let y = g.y(j);
        if (y - seed.1).abs() > search_radius {
            continue;
        }
        for i in 0..g.nx() {
            let x = g.x(i);
            if (x - seed.0).hypot(y - seed.1) > search_radius {
                continue;
            }
            let v = field.at(i, j).component(component).norm_sqr();
            if best.is_none_or(|b| v < b.2) {
                best = Some((i, j, v));
            }
        }
    }
    let (i, j, _) = best.ok_or_else(|| Error::Resolution("search disk contains no grid cells".into()))?;
    Ok(refine(field, component, i, j))
}

fn refine(field: &SpinorField, component: Component, i: usize, j: usize) -> (f64, f64) {
    let g = field.grid();
    let (x, y) = (g.x(i), g.y(j));
    if i == 0 || j == 0 || i + 1 >= g.nx() || j + 1 >= g.ny() {
        return (x, y);
    }
    let f = |di: isize, dj: isize| {
        field.at((i as isize + di) as usize, (j as isize + dj) as usize).component(component).norm_sqr()
    };
    let gx = (f(1, 0) - f(-1, 0)) / 2.0;
    let gy = (f(0, 1) - f(0, -1)) / 2.0;
    let hxx = f(1, 0) - 2.0 * f(0, 0) + f(-1, 0);
    let hyy = f(0, 1) - 2.0 * f(0, 0) + f(0, -1);
    let hxy = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / 4.0;
    let det = hxx * hyy - hxy * hxy;
    if !(det > 0.0 && hxx > 0.0) {
        return (x, y);
    }
    let du = (-(hyy * gx) + hxy * gy) / det;
    let dv = (hxy * gx - hxx * gy) / det;
    (x + du.clamp(-1.0, 1.0) * g.dx(), y + dv.clamp(-1.0, 1.0) * g.dy())
}

/// Amplitude zeros of `component` inside the rectangle `[x0, x1) x [y0, y1)`.
///
/// Candidates are 3x3 local minima of `|psi|` below `threshold * max|psi|`;
/// candidates closer than `min_separation` are merged, keeping the deepest.
pub fn find_zeros(
    field: &SpinorField,
    component: Component,
    region: [f64; 4],
    min_separation: f64,
    threshold: f64,
) -> Vec<(f64, f64)> {
    let g = field.grid();
    let amp: Vec<f64> = field.cells().iter().map(|s| s.component(component).norm()).collect();
    let peak = amp.iter().copied().fold(0.0, f64::max);
    let [x0, x1, y0, y1] = region;
    let margin = min_separation;
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for j in 1..g.ny() - 1 {
        let y = g.y(j);
        if y < y0 - margin || y >= y1 + margin {
            continue;
        }
        for i in 1..g.nx() - 1 {
            let x = g.x(i);
            if x < x0 - margin || x >= x1 + margin {
                continue;
            }
            let v = amp[g.flat(i, j)];
            if v > threshold * peak {
                continue;
            }
            let is_min = (-1isize..=1).all(|dj| {
                (-1isize..=1).all(|di| amp[g.flat((i as isize + di) as usize, (j as isize + dj) as usize)] >= v)
            });
            if is_min {
                candidates.push((v, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)).then(a.1.cmp(&b.1)));
    let mut kept: Vec<(f64, f64)> = Vec::new();
    for (_, i, j) in candidates {
        let p = refine(field, component, i, j);
        if kept.iter().all(|q| (p.0 - q.0).hypot(p.1 - q.1) >= min_separation) {
            kept.push(p);
        }
    }
    kept.retain(|p| p.0 >= x0 && p.0 < x1 && p.1 >= y0 && p.1 < y1);
    kept.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    kept
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vortex {
    pub x: f64,
    pub y: f64,
    pub winding: i32,
}

/// Zeros in `region` with their winding numbers on loops of `loop_radius`.
pub fn vortex_census(
    field: &SpinorField,
    component: Component,
    region: [f64; 4],
    period: f64,
    loop_radius: f64,
) -> Result<Vec<Vortex>> {
    find_zeros(field, component, region, period / 4.0, 0.1)
        .into_iter()
        .map(|(x, y)| Ok(Vortex { x, y, winding: winding_number(field, component, (x, y), loop_radius)? }))
        .collect()
}
