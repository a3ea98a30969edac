use std::f64::consts::PI;

use super::period::{dominant_frequency_1d, lattice_period};
use super::Axis;
use crate::beamline::golden_section_max;
use crate::error::{Error, Result};
use crate::maps::IntensityMap;

/// Least-squares fit, period included, of `I0 (1 + V cos(2 pi u / a + delta))` to a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub axis: Axis,
    pub period: f64,
    pub mean: f64,
    pub amplitude: f64,
    pub phase: f64,
    /// `amplitude / mean` clamped to `[0, 1]`.
    pub visibility: f64,
}

/// Profile along `axis`, averaged over the other axis.
fn profile(map: &IntensityMap, axis: Axis) -> (Vec<f64>, Vec<f64>) {
    let g = map.grid();
    match axis {
        Axis::X => {
            let p = (0..g.nx()).map(|i| (0..g.ny()).map(|j| map.get(i, j)).sum::<f64>() / g.ny() as f64).collect();
            ((0..g.nx()).map(|i| g.x(i)).collect(), p)
        }
        Axis::Y => {
            let p = (0..g.ny()).map(|j| (0..g.nx()).map(|i| map.get(i, j)).sum::<f64>() / g.nx() as f64).collect();
            ((0..g.ny()).map(|j| g.y(j)).collect(), p)
        }
    }
}

/// Returns `(c0, c1, c2)` for `c0 + c1 cos(ku) + c2 sin(ku)`.
fn cosine_fit(u: &[f64], p: &[f64], k: f64) -> Option<(f64, f64, f64)> {
    let mut m = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for (&u, &v) in u.iter().zip(p) {
        let b = [1.0, (k * u).cos(), (k * u).sin()];
        for i in 0..3 {
            r[i] += b[i] * v;
            for j in 0..3 {
                m[i][j] += b[i] * b[j];
            }
        }
    }
    solve3(m, r).map(|c| (c[0], c[1], c[2]))
}

fn solve3(mut m: [[f64; 3]; 3], mut r: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let piv = (c..3).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[piv][c].abs() < 1e-12 {
            return None;
        }
        m.swap(c, piv);
        r.swap(c, piv);
        for row in 0..3 {
            if row != c {
                let f = m[row][c] / m[c][c];
                for col in 0..3 {
                    m[row][col] -= f * m[c][col];
                }
                r[row] -= f * r[c];
            }
        }
    }
    Some([r[0] / m[0][0], r[1] / m[1][1], r[2] / m[2][2]])
}

/// Cosine fit along `axis` seeded by the spectral period.
pub fn fringe_fit(map: &IntensityMap, axis: Axis) -> Result<FringeFit> {
    let lattice = lattice_period(map)?;
    let (u, p) = profile(map, axis);
    let step = u[1] - u[0];
    let span = step * u.len() as f64;
    let seed = match axis {
        Axis::X => lattice.period_x,
        Axis::Y => lattice.period_y,
    }
    .or_else(|| dominant_frequency_1d(&p, step).map(|f| 1.0 / f))
    .ok_or_else(|| Error::NoLattice(format!("no fringe period along {axis}")))?;
    if span < 2.0 * seed {
        return Err(Error::NoLattice(format!(
            "{span:.2} mm along {axis} covers fewer than 2 periods of {seed:.2} mm"
        )));
    }
    let neg_residual = |k: f64| {
        cosine_fit(&u, &p, k).map_or(f64::NEG_INFINITY, |(c0, c1, c2)| {
            -u.iter().zip(&p).map(|(&u, &v)| (v - c0 - c1 * (k * u).cos() - c2 * (k * u).sin()).powi(2)).sum::<f64>()
        })
    };
    let k0 = 2.0 * PI / seed;
    let best = golden_section_max(neg_residual, 0.9 * k0, 1.1 * k0, 1e-6 * k0);
    let k = best.x;
    let (c0, c1, c2) = cosine_fit(&u, &p, k)
        .ok_or_else(|| Error::Numerical("singular fringe fit".into()))?;
    if !(c0 > 0.0) {
        return Err(Error::Numerical(format!("fringe fit mean {c0:.3e} is not positive")));
    }
    let amplitude = c1.hypot(c2);
    Ok(FringeFit {
        axis,
        period: 2.0 * PI / k,
        mean: c0,
        amplitude,
        phase: (-c2).atan2(c1),
        visibility: (amplitude / c0).clamp(0.0, 1.0),
    })
}

/// Fringe visibility along `axis` in `[0, 1]`.
pub fn visibility(map: &IntensityMap, axis: Axis) -> Result<f64> {
    fringe_fit(map, axis).map(|f| f.visibility)
}

/// `(p95 - p5) / (p95 + p5)` over the central 60% of the map in each axis.
pub fn lattice_contrast(map: &IntensityMap) -> Result<f64> {
    let g = map.grid();
    let window = |n: usize| (n / 5, n - n / 5);
    let ((i0, i1), (j0, j1)) = (window(g.nx()), window(g.ny()));
    let mut v: Vec<f64> = (j0..j1).flat_map(|j| (i0..i1).map(move |i| (i, j))).map(|(i, j)| map.get(i, j)).collect();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| v[((v.len() - 1) as f64 * p).round() as usize];
    let (lo, hi) = (q(0.05), q(0.95));
    if !(hi + lo > 0.0) {
        return Err(Error::Numerical("no intensity in the central region".into()));
    }
    Ok((hi - lo) / (hi + lo))
}

/// Pearson correlation of two maps on the same grid; 0 when either is flat.
pub fn correlation(a: &IntensityMap, b: &IntensityMap) -> Result<f64> {
    crate::field::same_grid(a.grid(), b.grid())?;
    let (ma, mb) = (a.mean(), b.mean());
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.values().iter().zip(b.values()) {
        let (da, db) = (x - ma, y - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return Ok(0.0);
    }
    Ok(sab / (saa * sbb).sqrt())
}

/// `|c_m| / c_0` for `m = 0..=max_m` of the intensity on a circle.
pub fn azimuthal_harmonics(
    map: &IntensityMap,
    center: (f64, f64),
    radius: f64,
    samples: usize,
    max_m: usize,
) -> Result<Vec<f64>> {
    if samples < 2 * max_m + 2 {
        return Err(Error::Resolution(format!("{samples} samples cannot resolve harmonic {max_m}")));
    }
    let ring: Vec<f64> = (0..samples)
        .map(|s| {
            let t = 2.0 * PI * s as f64 / samples as f64;
            map.sample(center.0 + radius * t.cos(), center.1 + radius * t.sin())
        })
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Domain(format!("circle of radius {radius} mm leaves the grid")))?;
    let c0 = ring.iter().sum::<f64>() / samples as f64;
    if !(c0 > 0.0) {
        return Err(Error::Numerical("no intensity on the sampling circle".into()));
    }
    Ok((0..=max_m)
        .map(|m| {
            let (re, im) = ring.iter().enumerate().fold((0.0, 0.0), |(re, im), (s, v)| {
                let t = 2.0 * PI * (m * s) as f64 / samples as f64;
                (re + v * t.cos(), im - v * t.sin())
            });
            re.hypot(im) / samples as f64 / c0
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use rand::{Rng, SeedableRng};

    #[test]
    fn perfect_fringes_are_fully_visible() {
        let g = make_grid(25.0, 25.0, 0.1).unwrap();
        let m = IntensityMap::from_fn(g, |_, y| (PI * y / 3.82).cos().powi(2)).unwrap();
        let f = fringe_fit(&m, Axis::Y).unwrap();
        assert!((f.visibility - 1.0).abs() < 1e-3, "{f:?}");
        assert!((f.period - 3.82).abs() < 1e-3, "{f:?}");
    }

    #[test]
    fn partial_modulation() {
        let g = make_grid(25.0, 25.0, 0.1).unwrap();
        let m = IntensityMap::from_fn(g, |x, _| 1.0 + 0.3 * (2.0 * PI * x / 5.0 + 0.4).cos()).unwrap();
        let f = fringe_fit(&m, Axis::X).unwrap();
        assert!((f.visibility - 0.3).abs() < 1e-3, "{f:?}");
    }

    #[test]
    fn noise_is_not_fringes() {
        let g = make_grid(25.0, 25.0, 0.1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let vals: Vec<f64> = (0..g.len()).map(|_| 1.0 + 0.01 * (rng.random::<f64>() - 0.5)).collect();
        let m = IntensityMap::new(g, vals).unwrap();
        match visibility(&m, Axis::Y) {
            Ok(v) => assert!(v < 0.05, "{v}"),
            Err(e) => assert!(matches!(e, Error::NoLattice(_)), "{e}"),
        }
    }

    #[test]
    fn flat_map_propagates_no_lattice() {
        let g = make_grid(10.0, 10.0, 0.1).unwrap();
        let m = IntensityMap::from_fn(g, |_, _| 1.0).unwrap();
        assert!(matches!(visibility(&m, Axis::X), Err(Error::NoLattice(_))));
    }

    #[test]
    fn too_few_periods() {
        let g = make_grid(10.0, 10.0, 0.1).unwrap();
        let m = IntensityMap::from_fn(g, |_, y| 1.0 + (2.0 * PI * y / 7.0).cos()).unwrap();
        assert!(visibility(&m, Axis::Y).is_err());
    }

    #[test]
    fn contrast_and_correlation() {
        let g = make_grid(10.0, 10.0, 0.1).unwrap();
        let a = IntensityMap::from_fn(g, |x, _| (PI * x / 2.0).cos().powi(2)).unwrap();
        // cos^2 percentiles: sin^2(0.025 pi) and cos^2(0.025 pi)
        let c = (0.025 * PI).cos().powi(2) - (0.025 * PI).sin().powi(2);
        assert!((lattice_contrast(&a).unwrap() - c).abs() < 5e-3);
        let flat = IntensityMap::from_fn(g, |_, _| 2.0).unwrap();
        assert_eq!(lattice_contrast(&flat).unwrap(), 0.0);
        assert!((correlation(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let b = IntensityMap::from_fn(g, |x, _| (PI * x / 2.0).sin().powi(2)).unwrap();
        assert!((correlation(&a, &b).unwrap() + 1.0).abs() < 1e-9);
        assert_eq!(correlation(&a, &flat).unwrap(), 0.0);
    }

    #[test]
    fn harmonics_of_a_dipole_pattern() {
        let g = make_grid(10.0, 10.0, 0.05).unwrap();
        let m = IntensityMap::from_fn(g, |x, y| 1.0 + 0.5 * (2.0 * y.atan2(x)).cos()).unwrap();
        let h = azimuthal_harmonics(&m, (0.0, 0.0), 2.0, 256, 4).unwrap();
        assert!((h[0] - 1.0).abs() < 1e-12);
        assert!((h[2] - 0.25).abs() < 5e-3, "{h:?}");
        assert!(h[1] < 5e-3 && h[3] < 5e-3);
    }
}
