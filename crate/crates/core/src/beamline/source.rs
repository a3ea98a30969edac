use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use super::trace::RayState;
use crate::error::{Error, Result};
use crate::su2::Spinor;

/// FWHM of a unit Gaussian.
const GAUSS_FWHM: f64 = 2.354_820_045_030_949;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularDistribution {
    Gaussian,
    Uniform,
}

impl std::fmt::Display for AngularDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AngularDistribution::Gaussian => "gaussian",
            AngularDistribution::Uniform => "uniform",
        })
    }
}

impl std::str::FromStr for AngularDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(AngularDistribution::Gaussian),
            "uniform" => Ok(AngularDistribution::Uniform),
            _ => Err(Error::Config(format!("angular distribution must be `gaussian` or `uniform`, got `{s}`"))),
        }
    }
}

/// Ray source at the slit plane (z = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    /// Coherence-defining slit, mm.
    pub slit_width_x: f64,
    pub slit_width_y: f64,
    /// Illuminated footprint over which ray start positions are spread, mm.
    /// Equal to the slit width for a pinhole source.
    pub beam_width_x: f64,
    pub beam_width_y: f64,
    /// Angular spread (FWHM), degrees.
    pub divergence_fwhm_x: f64,
    pub divergence_fwhm_y: f64,
    /// Slit to first prism, m.
    pub l1: f64,
    pub n_rays: usize,
    pub angular: AngularDistribution,
    pub seed: Option<u64>,
}

impl SourceModel {
    pub const DEFAULT_RAYS: usize = 100_000;

    pub fn validate(&self) -> Result<()> {
        if self.n_rays == 0 {
            return Err(Error::Config("n_rays must be at least 1".into()));
        }
        let fields = [
            ("slit_width_x", self.slit_width_x),
            ("slit_width_y", self.slit_width_y),
            ("beam_width_x", self.beam_width_x),
            ("beam_width_y", self.beam_width_y),
            ("divergence_fwhm_x", self.divergence_fwhm_x),
            ("divergence_fwhm_y", self.divergence_fwhm_y),
            ("l1", self.l1),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("source.{name} must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_divergent(&self) -> bool {
        self.divergence_fwhm_x > 0.0 || self.divergence_fwhm_y > 0.0
    }

    /// Seed to use, failing when a divergent source has none.
    pub fn resolved_seed(&self) -> Result<u64> {
        match self.seed {
            Some(s) => Ok(s),
            None if self.is_divergent() => {
                Err(Error::Config("a seed is required when the source divergence is non-zero".into()))
            }
            None => Ok(0),
        }
    }

    fn angle(&self, fwhm_deg: f64, u: f64, normal: &Normal) -> f64 {
        if fwhm_deg == 0.0 {
            return 0.0;
        }
        let fwhm = fwhm_deg.to_radians();
        match self.angular {
            AngularDistribution::Gaussian => fwhm / GAUSS_FWHM * normal.inverse_cdf(u),
            AngularDistribution::Uniform => fwhm * (u - 0.5),
        }
    }
}

/// Stratified source sample: jittered strata over the footprint, Latin
/// hypercube over each angle. Every ray carries weight `1 / n_rays`.
pub fn sample_rays(source: &SourceModel, seed: u64, spinor: Spinor) -> Vec<RayState> {
    let n = source.n_rays;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = (n as f64).sqrt().floor() as usize;
    let mut perm_x: Vec<usize> = (0..n).collect();
    let mut perm_y: Vec<usize> = (0..n).collect();
    perm_x.shuffle(&mut rng);
    perm_y.shuffle(&mut rng);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let open = |u: f64| u.clamp(1e-12, 1.0 - 1e-12);
    let weight = 1.0 / n as f64;
    (0..n)
        .map(|i| {
            let (ux, uy) = if i < m * m {
                (((i % m) as f64 + rng.random::<f64>()) / m as f64, ((i / m) as f64 + rng.random::<f64>()) / m as f64)
            } else {
                (rng.random::<f64>(), rng.random::<f64>())
            };
            let ax = open((perm_x[i] as f64 + rng.random::<f64>()) / n as f64);
            let ay = open((perm_y[i] as f64 + rng.random::<f64>()) / n as f64);
            let tx = source.angle(source.divergence_fwhm_x, ax, &normal);
            let ty = source.angle(source.divergence_fwhm_y, ay, &normal);
            RayState {
                x: (ux - 0.5) * source.beam_width_x,
                y: (uy - 0.5) * source.beam_width_y,
                slope_x: tx.tan(),
                slope_y: ty.tan(),
                spinor,
                weight,
            }
        })
        .collect()
}
