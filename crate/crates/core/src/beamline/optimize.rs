use super::simulate::{simulate_with, SimulateOptions};
use super::BeamlineConfig;
use crate::analysis::{correlation, lattice_contrast, visibility, Axis};
use crate::error::{Error, Result};
use crate::maps::IntensityMap;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Best point found by a line search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearch {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section maximization on `[lo, hi]` until the bracket is below `tol`.
/// Returns the best evaluated point, which includes both endpoints.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> LineSearch {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut best = LineSearch { x: a, value: f64::NEG_INFINITY, evaluations: 0 };
    let mut eval = |x: f64, best: &mut LineSearch| {
        let v = f(x);
        let v = if v.is_nan() { f64::NEG_INFINITY } else { v };
        best.evaluations += 1;
        if v > best.value {
            best.x = x;
            best.value = v;
        }
        v
    };
    eval(a, &mut best);
    eval(b, &mut best);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (eval(c, &mut best), eval(d, &mut best));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut best);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    pub lower: f64,
    pub upper: f64,
    pub line_tolerance: f64,
    /// Minimum relative gain for a coordinate move to be accepted.
    pub min_improvement: f64,
    pub max_sweeps: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions { lower: 0.0, upper: 10.0, line_tolerance: 1e-3, min_improvement: 1e-3, max_sweeps: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub initial_value: f64,
    /// Objective after the start and after each accepted move.
    pub trace: Vec<f64>,
    /// Free coordinates that never produced an accepted move.
    pub flat: Vec<usize>,
    pub evaluations: usize,
}

/// Coordinate ascent over `free` indices of `x0`, one golden-section search
/// per coordinate per sweep, until a sweep gains less than `min_improvement`.
pub fn coordinate_descent(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    free: &[usize],
    opts: &DescentOptions,
) -> Result<DescentResult> {
    if let Some(&i) = free.iter().find(|&&i| i >= x0.len()) {
        return Err(Error::Config(format!("free index {i} out of range for {} variables", x0.len())));
    }
    if !(opts.lower < opts.upper) {
        return Err(Error::Domain(format!("empty bounds [{}, {}]", opts.lower, opts.upper)));
    }
    let mut x: Vec<f64> = x0.iter().map(|v| v.clamp(opts.lower, opts.upper)).collect();
    let sanitize = |v: f64| if v.is_nan() { f64::NEG_INFINITY } else { v };
    let mut value = sanitize(f(&x));
    let initial_value = value;
    let mut evaluations = 1;
    let mut trace = vec![value];
    let mut moved = vec![false; x.len()];
    for _ in 0..opts.max_sweeps {
        let start = value;
        for &i in free {
            let mut probe = x.clone();
            let ls = golden_section_max(
                |v| {
                    probe[i] = v;
                    f(&probe)
                },
                opts.lower,
                opts.upper,
                opts.line_tolerance,
            );
            evaluations += ls.evaluations;
            if ls.value - value > opts.min_improvement * value.abs().max(1e-12) {
                x[i] = ls.x;
                value = ls.value;
                moved[i] = true;
                trace.push(value);
            }
        }
        if free.len() <= 1 || value - start <= opts.min_improvement * start.abs().max(1e-12) {
            break;
        }
    }
    Ok(DescentResult {
        x,
        value,
        initial_value,
        trace,
        flat: free.iter().copied().filter(|&i| !moved[i]).collect(),
        evaluations,
    })
}

/// Figure of merit computed on the analyzer image over the flux, both
/// block-summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    Visibility(Axis),
    LatticeContrast,
    /// Pearson correlation with the divergence-free image of the starting currents.
    FidelityToIdeal,
}

#[derive(Debug, Clone)]
pub struct OptimizeOptions {
    pub objective: Objective,
    /// Indices into the beamline's prism list.
    pub free: Vec<usize>,
    pub descent: DescentOptions,
    pub simulate: SimulateOptions,
    /// Block size for summing camera pixels before scoring.
    pub downsample: usize,
}

impl OptimizeOptions {
    pub fn new(objective: Objective, free: Vec<usize>) -> Self {
        OptimizeOptions { objective, free, descent: DescentOptions::default(), simulate: SimulateOptions::default(), downsample: 4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentOptimization {
    pub initial_currents: Vec<f64>,
    pub currents: Vec<f64>,
    pub initial_value: f64,
    pub value: f64,
    pub trace: Vec<f64>,
    /// Prism indices left unchanged because the objective did not improve.
    pub flat: Vec<usize>,
    pub evaluations: usize,
}

fn scored_image(config: &BeamlineConfig, opts: &OptimizeOptions) -> Result<(IntensityMap, IntensityMap)> {
    let sim = simulate_with(config, &opts.simulate)?;
    let img = sim
        .images
        .first()
        .ok_or_else(|| Error::Config("current optimization needs an analyzer".into()))?;
    let flux = sim.flux.downsample(opts.downsample)?;
    let map = img.intensity.downsample(opts.downsample)?.normalized_by(&flux)?;
    let ideal = img.ideal.downsample(opts.downsample)?;
    Ok((map, ideal))
}

fn score(objective: Objective, map: &IntensityMap, reference: &IntensityMap) -> Result<f64> {
    match objective {
        Objective::Visibility(axis) => visibility(map, axis),
        Objective::LatticeContrast => lattice_contrast(map),
        Objective::FidelityToIdeal => correlation(map, reference),
    }
}

/// Tunes the free prism currents within the descent bounds. Simulations or
/// analyses that fail during the search score zero.
pub fn optimize_currents(config: &BeamlineConfig, opts: &OptimizeOptions) -> Result<CurrentOptimization> {
    config.validate()?;
    let initial = config.currents();
    if opts.free.is_empty() {
        return Err(Error::Config("no free currents to optimize".into()));
    }
    if let Some(&i) = opts.free.iter().find(|&&i| i >= initial.len()) {
        return Err(Error::Config(format!("free coil {i} out of range; beamline has {} prisms", initial.len())));
    }
    let (_, reference) = scored_image(config, opts)?;
    let eval = |c: &[f64]| -> f64 {
        let mut cfg = config.clone();
        cfg.set_currents(c)
            .and_then(|_| scored_image(&cfg, opts))
            .and_then(|(map, _)| score(opts.objective, &map, &reference))
            .unwrap_or(0.0)
    };
    let r = coordinate_descent(eval, &initial, &opts.free, &opts.descent)?;
    Ok(CurrentOptimization {
        initial_currents: initial,
        currents: r.x,
        initial_value: r.initial_value,
        value: r.value,
        trace: r.trace,
        flat: r.flat,
        evaluations: r.evaluations,
    })
}
