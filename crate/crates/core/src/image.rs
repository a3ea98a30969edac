//! 16-bit binary graymaps with a plain-text sidecar, and CSV dumps.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::maps::{IntensityMap, PhaseMap};

pub const MAXVAL: u16 = u16::MAX;

#[derive(Debug, Clone, Copy)]
pub enum ImageData<'a> {
    Intensity(&'a IntensityMap),
    Phase(&'a PhaseMap),
}

impl<'a> From<&'a IntensityMap> for ImageData<'a> {
    fn from(m: &'a IntensityMap) -> Self {
        ImageData::Intensity(m)
    }
}

impl<'a> From<&'a PhaseMap> for ImageData<'a> {
    fn from(m: &'a PhaseMap) -> Self {
        ImageData::Phase(m)
    }
}

impl ImageData<'_> {
    fn grid(&self) -> &Grid {
        match self {
            ImageData::Intensity(m) => m.grid(),
            ImageData::Phase(m) => m.grid(),
        }
    }

    /// Value at a cell; `None` for masked phase cells.
    fn value(&self, i: usize, j: usize) -> Option<f64> {
        match self {
            ImageData::Intensity(m) => Some(m.get(i, j)),
            ImageData::Phase(m) => m.get(i, j),
        }
    }

    /// Scaling range: data range for intensities, fixed `(-pi, pi]` for phases.
    fn range(&self) -> (f64, f64) {
        match self {
            ImageData::Intensity(m) => (m.min(), m.max()),
            ImageData::Phase(_) => (-PI, PI),
        }
    }
}

/// Sidecar path: the image path with its extension replaced by `meta`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta")
}

/// Pixel values, row-major with the top row at +y.
pub fn pixels(data: ImageData<'_>) -> Result<Vec<u16>> {
    let g = *data.grid();
    let (lo, hi) = data.range();
    let mut out = Vec::with_capacity(g.len());
    for j in (0..g.ny()).rev() {
        for i in 0..g.nx() {
            let p = match data.value(i, j) {
                None => 0,
                Some(v) if !v.is_finite() => {
                    return Err(Error::Numerical(format!("non-finite value at cell ({i}, {j})")));
                }
                Some(_) if hi <= lo => MAXVAL,
                Some(v) => ((v - lo) / (hi - lo) * MAXVAL as f64).round().clamp(0.0, MAXVAL as f64) as u16,
            };
            out.push(p);
        }
    }
    Ok(out)
}

/// Binary P5 graymap bytes, big-endian samples.
pub fn encode_pgm(data: ImageData<'_>) -> Result<Vec<u8>> {
    let g = data.grid();
    let px = pixels(data)?;
    let mut bytes = format!("P5\n{} {}\n{}\n", g.nx(), g.ny(), MAXVAL).into_bytes();
    bytes.reserve(2 * px.len());
    for p in px {
        bytes.extend_from_slice(&p.to_be_bytes());
    }
    Ok(bytes)
}

pub fn metadata(data: ImageData<'_>) -> String {
    let g = data.grid();
    let (lo, hi) = data.range();
    let mut s = String::new();
    let kind = match data {
        ImageData::Intensity(_) => "intensity",
        ImageData::Phase(_) => "phase",
    };
    let _ = writeln!(s, "kind = {kind}");
    let _ = writeln!(s, "width = {}", g.nx());
    let _ = writeln!(s, "height = {}", g.ny());
    let _ = writeln!(s, "pitch_x_mm = {}", g.dx());
    let _ = writeln!(s, "pitch_y_mm = {}", g.dy());
    let _ = writeln!(s, "x_first_mm = {}", g.x(0));
    let _ = writeln!(s, "y_top_mm = {}", g.y(g.ny() - 1));
    let _ = writeln!(s, "maxval = {MAXVAL}");
    let _ = writeln!(s, "min = {lo}");
    let _ = writeln!(s, "max = {hi}");
    match data {
        ImageData::Intensity(m) => {
            let _ = writeln!(s, "scaling = linear, min -> 0, max -> {MAXVAL}; flat maps are written as {MAXVAL}");
            let _ = writeln!(s, "total = {}", m.total());
        }
        ImageData::Phase(m) => {
            let _ = writeln!(s, "scaling = linear, -pi -> 0, pi -> {MAXVAL}; masked cells are 0");
            let _ = writeln!(s, "valid_cells = {}", m.valid_count());
        }
    }
    s
}

/// Cell values as comma-separated rows, top row at +y. Masked phases are `nan`.
pub fn encode_csv(data: ImageData<'_>) -> String {
    let g = data.grid();
    let mut s = String::with_capacity(g.len() * 12);
    for j in (0..g.ny()).rev() {
        for i in 0..g.nx() {
            if i > 0 {
                s.push(',');
            }
            match data.value(i, j) {
                Some(v) => {
                    let _ = write!(s, "{v}");
                }
                None => s.push_str("nan"),
            }
        }
        s.push('\n');
    }
    s
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Writes the graymap and its sidecar; returns both paths.
pub fn write_image<'a>(data: impl Into<ImageData<'a>>, path: &Path) -> Result<Vec<PathBuf>> {
    let data = data.into();
    let bytes = encode_pgm(data)?;
    fs::write(path, bytes).map_err(|e| io_error(path, e))?;
    let meta = sidecar_path(path);
    fs::write(&meta, metadata(data)).map_err(|e| io_error(&meta, e))?;
    Ok(vec![path.to_path_buf(), meta])
}

pub fn write_csv<'a>(data: impl Into<ImageData<'a>>, path: &Path) -> Result<PathBuf> {
    fs::write(path, encode_csv(data.into())).map_err(|e| io_error(path, e))?;
    Ok(path.to_path_buf())
}
