use super::source::sample_rays;
use super::trace::PreparedBeamline;
use super::BeamlineConfig;
use crate::elements::{polarizer_members, SpinFilter};
use crate::error::{Error, Result};
use crate::field::{Normalization, SpinorField};
use crate::maps::IntensityMap;
use crate::par::{self, Execution};
use crate::su2::Spinor;

/// Rays per work item. Chunk boundaries, and therefore the summation
/// order, do not depend on the thread count.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    /// Analyzer settings to image. Empty means the configured analyzer, or
    /// none (flux only) when the beamline has no analyzer.
    pub filters: Vec<SpinFilter>,
    pub seed: Option<u64>,
    pub n_rays: Option<usize>,
    pub exec: Execution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredImage {
    pub filter: SpinFilter,
    /// Monte Carlo camera image.
    pub intensity: IntensityMap,
    /// Same analyzer applied to the divergence-free fields.
    pub ideal: IntensityMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub rays: usize,
    pub rays_on_camera: usize,
    pub rays_blocked: usize,
    pub seed: u64,
    /// Total weight leaving the source.
    pub source_weight: f64,
    /// Total unfiltered weight binned on the camera.
    pub camera_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    /// Unfiltered intensity (no analyzer).
    pub flux: IntensityMap,
    pub images: Vec<FilteredImage>,
    /// Divergence-free field of the majority polarizer state on the camera grid.
    pub ideal: SpinorField,
    pub diagnostics: Diagnostics,
}

impl Simulation {
    /// The first filtered image divided by the flux, cell by cell.
    pub fn transmission(&self) -> Result<IntensityMap> {
        match self.images.first() {
            Some(img) => img.intensity.normalized_by(&self.flux),
            None => Err(Error::Config("simulation has no analyzer image".into())),
        }
    }
}

pub fn simulate(config: &BeamlineConfig) -> Result<Simulation> {
    simulate_with(config, &SimulateOptions::default())
}

/// Monte Carlo over source rays and the polarizer mixture, binned on the
/// camera grid. Deterministic for a given seed under either execution mode.
pub fn simulate_with(config: &BeamlineConfig, opts: &SimulateOptions) -> Result<Simulation> {
    let mut source = config.source.clone();
    if let Some(n) = opts.n_rays {
        source.n_rays = n;
    }
    if opts.seed.is_some() {
        source.seed = opts.seed;
    }
    let mut cfg = config.clone();
    cfg.source = source.clone();
    let line = PreparedBeamline::new(&cfg)?;
    let seed = source.resolved_seed()?;
    let filters: Vec<SpinFilter> = if opts.filters.is_empty() {
        config.analyzer().into_iter().collect()
    } else {
        opts.filters.clone()
    };
    for f in &filters {
        SpinFilter::new(f.direction, f.analyzing_power)?;
    }
    let members = polarizer_members(config.initial_direction, config.polarization)?;
    let grid = config.camera.grid;
    let cells = grid.len();
    let planes = 1 + filters.len();

    let rays = sample_rays(&source, seed, Spinor::UP);
    let chunks: Vec<&[super::RayState]> = rays.chunks(CHUNK).collect();
    let partials = par::map_slice(opts.exec, &chunks, |chunk| {
        let mut acc = vec![0.0; planes * cells];
        let (mut hits, mut blocked) = (0usize, 0usize);
        for ray in chunk.iter() {
            let Some((x, y, u)) = line.propagate(ray.x, ray.y, ray.slope_x, ray.slope_y) else {
                blocked += 1;
                continue;
            };
            let Some(k) = grid.bin(x, y) else { continue };
            hits += 1;
            for (w, psi) in &members {
                let out = u.apply(psi);
                let w = w * ray.weight;
                acc[k] += w * out.norm_sqr();
                for (p, f) in filters.iter().enumerate() {
                    acc[(p + 1) * cells + k] += w * f.transmission(&out);
                }
            }
        }
        (acc, hits, blocked)
    });
    let rays_on_camera = partials.iter().map(|p| p.1).sum();
    let rays_blocked = partials.iter().map(|p| p.2).sum();
    let acc = par::pairwise_sum(partials.into_iter().map(|p| p.0).collect())
        .unwrap_or_else(|| vec![0.0; planes * cells]);
    if acc.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite intensity accumulated on the camera".into()));
    }
    let mut planes_iter = acc.chunks(cells).map(|c| IntensityMap::new(grid, c.to_vec()));
    let flux = planes_iter.next().expect("flux plane")?;

    let unitaries = par::map_indices(opts.exec, cells, |k| {
        let (x, y) = grid.coords(k);
        line.parallel_unitary(x, y)
    });
    let ideal_cells: Vec<Spinor> = unitaries.iter().map(|u| u.apply(&members[0].1)).collect();
    let ideal = SpinorField::from_cells(grid, ideal_cells, Normalization::PerCell)?;
    let mut images = Vec::with_capacity(filters.len());
    for (f, intensity) in filters.iter().zip(planes_iter) {
        let values = unitaries
            .iter()
            .map(|u| members.iter().map(|(w, psi)| w * f.transmission(&u.apply(psi))).sum())
            .collect();
        images.push(FilteredImage { filter: *f, intensity: intensity?, ideal: IntensityMap::new(grid, values)? });
    }
    let camera_weight = flux.total();
    Ok(Simulation {
        flux,
        images,
        ideal,
        diagnostics: Diagnostics {
            rays: source.n_rays,
            rays_on_camera,
            rays_blocked,
            seed,
            source_weight: members.iter().map(|m| m.0).sum::<f64>() * rays.iter().map(|r| r.weight).sum::<f64>(),
            camera_weight,
        },
    })
}
