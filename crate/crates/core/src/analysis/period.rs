use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::maps::IntensityMap;

/// Minimum peak-to-background magnitude ratio for a lattice to count.
const PEAK_OVER_BACKGROUND: f64 = 3.0;

/// Dominant spatial frequency of an intensity pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePeriod {
    /// cycles/mm; the peak is reported with `fy >= 0`.
    pub fx: f64,
    pub fy: f64,
    /// `1 / |f|` in mm.
    pub period: f64,
    /// `1 / |fx|` when the peak has a resolvable x component.
    pub period_x: Option<f64>,
    pub period_y: Option<f64>,
    pub peak_to_background: f64,
}

impl LatticePeriod {
    /// Smallest resolved axis period, the lattice constant of square lattices.
    pub fn axis_period(&self) -> f64 {
        match (self.period_x, self.period_y) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => self.period,
        }
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64).cos()).collect()
}

fn padded_len(n: usize) -> usize {
    (2 * n).next_power_of_two()
}

/// Log-parabolic vertex offset in `[-0.5, 0.5]` from three magnitudes.
fn vertex(l: f64, c: f64, r: f64) -> f64 {
    let (l, c, r) = (l.max(1e-300).ln(), c.max(1e-300).ln(), r.max(1e-300).ln());
    let den = l - 2.0 * c + r;
    if den.abs() < 1e-300 {
        0.0
    } else {
        (0.5 * (l - r) / den).clamp(-0.5, 0.5)
    }
}

fn signed(k: usize, n: usize) -> isize {
    if k > n / 2 {
        k as isize - n as isize
    } else {
        k as isize
    }
}

/// Dominant nonzero peak of the windowed 2D discrete Fourier transform with
/// sub-bin refinement.
pub fn lattice_period(intensity: &IntensityMap) -> Result<LatticePeriod> {
    let g = intensity.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let (px, py) = (padded_len(nx), padded_len(ny));
    let (wx, wy) = (hann(nx), hann(ny));
    let wsum: f64 = wy.iter().map(|a| wx.iter().map(|b| a * b).sum::<f64>()).sum();
    let wmean: f64 = (0..ny)
        .map(|j| (0..nx).map(|i| wx[i] * wy[j] * intensity.get(i, j)).sum::<f64>())
        .sum::<f64>()
        / wsum;
    let mut data = vec![Complex64::new(0.0, 0.0); px * py];
    for j in 0..ny {
        for i in 0..nx {
            data[j * px + i] = Complex64::new(wx[i] * wy[j] * (intensity.get(i, j) - wmean), 0.0);
        }
    }
    let mut planner = FftPlanner::new();
    let row = planner.plan_fft_forward(px);
    for r in data.chunks_mut(px) {
        row.process(r);
    }
    let col = planner.plan_fft_forward(py);
    let mut buf = vec![Complex64::new(0.0, 0.0); py];
    for i in 0..px {
        for j in 0..py {
            buf[j] = data[j * px + i];
        }
        col.process(&mut buf);
        for j in 0..py {
            data[j * px + i] = buf[j];
        }
    }
    let mag = |kx: usize, ky: usize| data[(ky % py) * px + (kx % px)].norm();
    let (gx, gy) = ((px / nx) as isize, (py / ny) as isize);
    let mut best = (0usize, 0usize, 0.0f64);
    let (mut bg, mut count) = (0.0, 0usize);
    for ky in 0..=py / 2 {
        for kx in 0..px {
            let (sx, sy) = (signed(kx, px), ky as isize);
            if sx.abs() < gx && sy < gy {
                continue;
            }
            if ky == 0 && sx < 0 {
                continue;
            }
            let m = mag(kx, ky);
            bg += m;
            count += 1;
            if m > best.2 {
                best = (kx, ky, m);
            }
        }
    }
    let bg = bg / count.max(1) as f64;
    let (kx, ky, peak) = best;
    let scale: f64 = wsum * wmean.abs();
    if !(peak > 1e-9 * scale) || peak <= PEAK_OVER_BACKGROUND * bg {
        return Err(Error::NoLattice(format!(
            "spectral peak {:.3e} does not exceed {PEAK_OVER_BACKGROUND} x background {:.3e}",
            peak, bg
        )));
    }
    let dx_off = vertex(mag(kx + px - 1, ky), peak, mag(kx + 1, ky));
    let dy_off = vertex(mag(kx, ky + py - 1), peak, mag(kx, ky + 1));
    let fx = (signed(kx, px) as f64 + dx_off) / (px as f64 * g.dx());
    let fy = (ky as f64 + dy_off) / (py as f64 * g.dy());
    let resolvable = |f: f64, n: usize, d: f64| f.abs() >= 0.5 / (n as f64 * d);
    Ok(LatticePeriod {
        fx,
        fy,
        period: 1.0 / fx.hypot(fy),
        period_x: resolvable(fx, nx, g.dx()).then(|| 1.0 / fx.abs()),
        period_y: resolvable(fy, ny, g.dy()).then(|| 1.0 / fy.abs()),
        peak_to_background: peak / bg,
    })
}

/// Strongest non-DC frequency (cycles per unit) of a sampled profile.
pub(crate) fn dominant_frequency_1d(profile: &[f64], step: f64) -> Option<f64> {
    let n = profile.len();
    let p = padded_len(n);
    let w = hann(n);
    let wsum: f64 = w.iter().sum();
    let mean = profile.iter().zip(&w).map(|(v, w)| v * w).sum::<f64>() / wsum;
    let mut data: Vec<Complex64> = (0..p)
        .map(|i| if i < n { Complex64::new(w[i] * (profile[i] - mean), 0.0) } else { Complex64::new(0.0, 0.0) })
        .collect();
    FftPlanner::new().plan_fft_forward(p).process(&mut data);
    let guard = p / n;
    let (k, peak) = (guard..=p / 2).map(|k| (k, data[k].norm())).fold((0, 0.0), |b, c| if c.1 > b.1 { c } else { b });
    if !(peak > 0.0) || k == 0 {
        return None;
    }
    let off = vertex(data[k - 1].norm(), peak, data[(k + 1) % p].norm());
    Some((k as f64 + off) / (p as f64 * step))
}
