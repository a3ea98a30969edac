//! Scenario execution behind the command-line tool.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{
    lattice_period, oam_spectrum, phase_difference_map, vortex_census, visibility, Axis, Vortex,
};
use crate::beamline::{optimize_currents, simulate_with, BeamlineConfig, Objective, OptimizeOptions, SimulateOptions, Simulation};
use crate::config::{parse_config, scenario, serialize, ParsedConfig};
use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::image::{write_csv, write_image, ImageData};
use crate::maps::IntensityMap;
use crate::par::Execution;
use crate::su2::Component;

/// Block size used when scoring Monte Carlo images.
pub const ANALYSIS_DOWNSAMPLE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputSet {
    pub intensity: bool,
    pub phase: bool,
    pub oam: bool,
    pub windings: bool,
    pub report: bool,
}

impl Default for OutputSet {
    fn default() -> Self {
        OutputSet { intensity: true, phase: true, oam: true, windings: true, report: true }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunSpec {
    pub config: Option<PathBuf>,
    pub scenario: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub rays: Option<usize>,
    pub csv: bool,
    pub outputs: OutputSet,
    pub exec: Execution,
    pub objective: Option<Objective>,
    /// 0-based prism indices.
    pub free: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

/// Config text and a display name for it.
pub fn load(spec: &RunSpec) -> Result<(ParsedConfig, String)> {
    let (text, name) = match (&spec.config, &spec.scenario) {
        (Some(_), Some(_)) => return Err(Error::Config("give either --config or --scenario, not both".into())),
        (Some(p), None) => (
            fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
            p.display().to_string(),
        ),
        (None, Some(s)) => (scenario(s)?.to_string(), format!("scenario {s}")),
        (None, None) => return Err(Error::Config("one of --config or --scenario is required".into())),
    };
    let mut parsed = parse_config(&text)?;
    if let Some(seed) = spec.seed {
        parsed.config.source.seed = Some(seed);
    }
    if let Some(n) = spec.rays {
        parsed.config.source.n_rays = n;
    }
    parsed.config.validate()?;
    parsed.config.source.resolved_seed()?;
    Ok((parsed, name))
}

/// Files created so far; removed again if the run fails.
struct Writer {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
    csv: bool,
}

impl Writer {
    fn new(dir: &Path, csv: bool) -> Result<Self> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        Ok(Writer { dir: dir.to_path_buf(), created_dir, files: Vec::new(), csv })
    }

    fn image<'a>(&mut self, name: &str, data: impl Into<ImageData<'a>>) -> Result<()> {
        let data = data.into();
        let path = self.dir.join(format!("{name}.pgm"));
        // registered first so a partial write is cleaned up too
        self.files.push(path.clone());
        self.files.push(crate::image::sidecar_path(&path));
        write_image(data, &path)?;
        if self.csv {
            let csv = self.dir.join(format!("{name}.csv"));
            self.files.push(csv.clone());
            write_csv(data, &csv)?;
        }
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        self.files.push(path.clone());
        fs::write(&path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    fn discard(&self) {
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }

    fn names(&self) -> Vec<String> {
        self.files
            .iter()
            .map(|f| f.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned()))
            .collect()
    }
}

fn fmt_currents(c: &[f64]) -> String {
    c.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(", ")
}

fn or_reason<T>(r: Result<T>, f: impl FnOnce(T) -> String) -> String {
    match r {
        Ok(v) => f(v),
        Err(e) => format!("n/a ({}: {})", e.category(), short(&e)),
    }
}

fn short(e: &Error) -> String {
    let s = e.to_string();
    s.split_once(": ").map_or(s.clone(), |(_, rest)| rest.to_string())
}

/// Zeros in a 2a x 2a window centered at `(a/4, a/4)`, which keeps the
/// half-period zero lattice off the window edges.
pub fn census_region(a: f64) -> [f64; 4] {
    [-0.75 * a, 1.25 * a, -0.75 * a, 1.25 * a]
}

/// The census window clipped so every winding loop stays on the grid.
fn census(field: &SpinorField, a: f64) -> Result<Vec<Vortex>> {
    let g = field.grid();
    let (hx, hy) = (g.x(g.nx() - 1) - a / 8.0 - g.dx(), g.y(g.ny() - 1) - a / 8.0 - g.dy());
    let [x0, x1, y0, y1] = census_region(a);
    vortex_census(field, Component::Down, [x0.max(-hx), x1.min(hx), y0.max(-hy), y1.min(hy)], a, a / 8.0)
}

/// OAM weights at the zero nearest the origin, radius `a/8` raised to the
/// resolvable minimum when that stays within `a/4`.
fn delta_l(field: &SpinorField, zeros: &[Vortex], a: f64) -> Result<(f64, f64, i32, i32, f64)> {
    let c = zeros
        .iter()
        .min_by(|p, q| p.x.hypot(p.y).total_cmp(&q.x.hypot(q.y)))
        .ok_or_else(|| Error::NoLattice("no down-component zero near the axis".into()))?;
    let pitch = field.grid().dx().max(field.grid().dy());
    let r = (a / 8.0).max(16.0 * pitch / std::f64::consts::PI);
    if r > a / 4.0 {
        return Err(Error::Resolution(format!("period {a:.3} mm is too small for the camera pitch")));
    }
    let up = oam_spectrum(field, (c.x, c.y), Component::Up, r, 4)?;
    let down = oam_spectrum(field, (c.x, c.y), Component::Down, r, 4)?;
    Ok((c.x, c.y, up.dominant(), down.dominant(), r))
}

fn oam_table(field: &SpinorField, zeros: &[Vortex], a: f64) -> String {
    let mut s = String::from("x_mm\ty_mm\twinding\tcomponent");
    for l in -4..=4 {
        let _ = write!(s, "\tw{l}");
    }
    s.push('\n');
    let pitch = field.grid().dx().max(field.grid().dy());
    let r = (a / 8.0).max(16.0 * pitch / std::f64::consts::PI);
    for z in zeros {
        for c in [Component::Up, Component::Down] {
            let _ = write!(s, "{:.4}\t{:.4}\t{}\t{c}", z.x, z.y, z.winding);
            match oam_spectrum(field, (z.x, z.y), c, r, 4) {
                Ok(spec) => {
                    for l in -4..=4 {
                        let _ = write!(s, "\t{:.6}", spec.weight(l));
                    }
                }
                Err(e) => {
                    let _ = write!(s, "\t{}", e.category());
                }
            }
            s.push('\n');
        }
    }
    s
}

/// Analyzer image over flux, both block-summed first.
pub fn analysis_map(sim: &Simulation) -> Result<IntensityMap> {
    let img = sim.images.first().ok_or_else(|| Error::Config("no analyzer image".into()))?;
    let flux = sim.flux.downsample(ANALYSIS_DOWNSAMPLE)?;
    img.intensity.downsample(ANALYSIS_DOWNSAMPLE)?.normalized_by(&flux)
}

/// Simulates one configuration and writes its outputs with `prefix`.
fn single(config: &BeamlineConfig, spec: &RunSpec, w: &mut Writer, prefix: &str, report: &mut String) -> Result<()> {
    let sim = simulate_with(config, &SimulateOptions { exec: spec.exec, ..Default::default() })?;
    let d = &sim.diagnostics;
    let _ = writeln!(report, "seed: {}", d.seed);
    let _ = writeln!(report, "rays: {} (on camera {}, blocked {})", d.rays, d.rays_on_camera, d.rays_blocked);
    let _ = writeln!(report, "flux on camera: {:.6} of {:.6}", d.camera_weight, d.source_weight);
    let _ = writeln!(report, "currents [A]: {}", fmt_currents(&config.currents()));
    let nominal = config.nominal_period()?;
    let _ = writeln!(report, "nominal period: {}", nominal.map_or("none (no active prism)".into(), |a| format!("{a:.4} mm")));
    match config.analyzer() {
        Some(f) => {
            let _ = writeln!(report, "analyzer: {}, analyzing power {}", f.direction, f.analyzing_power);
        }
        None => {
            let _ = writeln!(report, "analyzer: none");
        }
    }

    if spec.outputs.intensity {
        w.image(&format!("{prefix}flux"), &sim.flux)?;
        for img in &sim.images {
            let tag = img.filter.direction.tag();
            w.image(&format!("{prefix}intensity_{tag}"), &img.intensity)?;
            w.image(&format!("{prefix}ideal_{tag}"), &img.ideal)?;
        }
    }
    if spec.outputs.phase {
        w.image(&format!("{prefix}phase"), &phase_difference_map(&sim.ideal))?;
    }

    if !sim.images.is_empty() {
        let map = analysis_map(&sim);
        let period = map.as_ref().map_err(Clone::clone).and_then(lattice_period);
        let _ = writeln!(
            report,
            "lattice period: {}",
            or_reason(period, |p| {
                let axis = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3} mm"));
                format!(
                    "{:.3} mm (x {}, y {}), peak/background {:.1}",
                    p.period,
                    axis(p.period_x),
                    axis(p.period_y),
                    p.peak_to_background
                )
            })
        );
        for axis in [Axis::X, Axis::Y] {
            let v = map.as_ref().map_err(Clone::clone).and_then(|m| visibility(m, axis));
            let _ = writeln!(report, "visibility {axis}: {}", or_reason(v, |v| format!("{v:.4}")));
        }
    }

    let pairs = config.active_prisms() >= 2;
    match nominal {
        Some(a) if pairs => {
            let zeros = census(&sim.ideal, a);
            let _ = writeln!(
                report,
                "windings (down, 2a x 2a window): {}",
                or_reason(zeros.clone(), |z| {
                    let plus = z.iter().filter(|v| v.winding > 0).count();
                    let minus = z.iter().filter(|v| v.winding < 0).count();
                    let sum: i32 = z.iter().map(|v| v.winding).sum();
                    format!("{} zeros, {plus} positive, {minus} negative, sum {sum}", z.len())
                })
            );
            let dl = zeros.clone().and_then(|z| delta_l(&sim.ideal, &z, a));
            let _ = writeln!(
                report,
                "delta-l: {}",
                or_reason(dl, |(x, y, lu, ld, r)| {
                    let verdict = if lu - ld == 1 { "spin-orbit correlated" } else { "not correlated" };
                    format!("l_up = {lu}, l_down = {ld} at ({x:.3}, {y:.3}) mm, radius {r:.3} mm; l_up - l_down = {} ({verdict})", lu - ld)
                })
            );
            if let Ok(z) = zeros {
                if spec.outputs.windings {
                    let mut t = String::from("x_mm\ty_mm\twinding\n");
                    for v in &z {
                        let _ = writeln!(t, "{:.4}\t{:.4}\t{}", v.x, v.y, v.winding);
                    }
                    w.text(&format!("{prefix}windings.tsv"), &t)?;
                }
                if spec.outputs.oam {
                    w.text(&format!("{prefix}oam.tsv"), &oam_table(&sim.ideal, &z, a))?;
                }
            }
        }
        _ => {
            let _ = writeln!(report, "windings: n/a (needs an active prism pair)");
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Sweep,
    Optimize,
    Validate,
}

fn header(report: &mut String, command: &str, name: &str, parsed: &ParsedConfig) {
    let _ = writeln!(report, "{command}: {name}");
    if parsed.defaults.is_empty() {
        let _ = writeln!(report, "defaults applied: none");
    } else {
        let _ = writeln!(report, "defaults applied:");
        for d in &parsed.defaults {
            let _ = writeln!(report, "  {d}");
        }
    }
}

fn default_objective(config: &BeamlineConfig) -> Objective {
    let active: Vec<_> = config.prisms().filter(|p| p.period(&config.physics).ok().flatten().is_some()).collect();
    match active.as_slice() {
        [] => Objective::LatticeContrast,
        [p] => Objective::Visibility(p.axis),
        _ if active.iter().all(|p| p.axis == active[0].axis) => Objective::Visibility(active[0].axis),
        _ => Objective::LatticeContrast,
    }
}

fn objective_name(o: Objective) -> String {
    match o {
        Objective::Visibility(a) => format!("visibility along {a}"),
        Objective::LatticeContrast => "lattice contrast".into(),
        Objective::FidelityToIdeal => "correlation with the divergence-free image".into(),
    }
}

fn execute(command: Command, spec: &RunSpec, parsed: &ParsedConfig, name: &str, w: &mut Writer) -> Result<String> {
    let mut report = String::new();
    let config = &parsed.config;
    match command {
        Command::Validate => unreachable!("validate writes no files"),
        Command::Run => {
            header(&mut report, "run", name, parsed);
            single(config, spec, w, "", &mut report)?;
        }
        Command::Sweep => {
            header(&mut report, "sweep", name, parsed);
            let sweep = parsed
                .sweep
                .as_ref()
                .ok_or_else(|| Error::Config("sweep needs a [sweep] section with `param` and `values`".into()))?;
            let _ = writeln!(report, "parameter: {} [{}]", sweep.param, sweep.param.unit());
            for (k, v) in sweep.values.iter().enumerate() {
                let _ = writeln!(report, "\n[{k}] {} = {v}", sweep.param);
                let c = sweep.param.apply(config, *v)?;
                single(&c, spec, w, &format!("step{k}_"), &mut report)?;
            }
        }
        Command::Optimize => {
            header(&mut report, "optimize", name, parsed);
            let objective = spec.objective.unwrap_or_else(|| default_objective(config));
            let free = spec.free.clone().unwrap_or_else(|| (0..config.prisms().count()).collect());
            let mut opts = OptimizeOptions::new(objective, free.clone());
            opts.simulate.exec = spec.exec;
            let r = optimize_currents(config, &opts)?;
            let _ = writeln!(report, "objective: {}", objective_name(objective));
            let _ = writeln!(report, "free coils: {}", free.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(", "));
            let _ = writeln!(report, "initial currents [A]: {}", fmt_currents(&r.initial_currents));
            let _ = writeln!(report, "optimized currents [A]: {}", fmt_currents(&r.currents));
            let _ = writeln!(report, "objective: {:.6} -> {:.6} in {} evaluations", r.initial_value, r.value, r.evaluations);
            let _ = writeln!(report, "trace: {}", r.trace.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", "));
            let _ = writeln!(
                report,
                "flat coils: {}",
                if r.flat.is_empty() {
                    "none".into()
                } else {
                    r.flat.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(", ")
                }
            );
            let mut best = config.clone();
            best.set_currents(&r.currents)?;
            w.text("optimized.toml", &serialize(&best, parsed.sweep.as_ref()))?;
            let _ = writeln!(report, "\noptimized run:");
            single(&best, spec, w, "", &mut report)?;
        }
    }
    Ok(report)
}

/// Runs a command; on failure every file it created is removed.
pub fn run(command: Command, spec: &RunSpec) -> Result<RunOutcome> {
    let (parsed, name) = load(spec)?;
    if command == Command::Validate {
        let mut report = String::new();
        header(&mut report, "valid", &name, &parsed);
        let _ = writeln!(report, "elements: {}", parsed.config.elements.len());
        if let Some(s) = &parsed.sweep {
            let _ = writeln!(report, "sweep: {} over {} values", s.param, s.values.len());
        }
        return Ok(RunOutcome { summary: report, files: Vec::new() });
    }
    let out = spec.out.clone().ok_or_else(|| Error::Config("--out is required".into()))?;
    let mut w = Writer::new(&out, spec.csv)?;
    let result = execute(command, spec, &parsed, &name, &mut w).and_then(|mut report| {
        if spec.outputs.report {
            let mut names = w.names();
            names.push("report.txt".into());
            let _ = writeln!(report, "\nfiles: {}", names.join(", "));
            w.text("report.txt", &report)?;
        }
        Ok(report)
    });
    match result {
        Ok(summary) => Ok(RunOutcome { summary, files: w.files.clone() }),
        Err(e) => {
            w.discard();
            Err(e)
        }
    }
}
