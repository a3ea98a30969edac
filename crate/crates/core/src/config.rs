//! TOML beamline description.
//!
//! ```toml
//! [physics]
//! wavelength = 0.41          # nm
//! theta = 60.0               # deg
//! b_per_amp = 0.0014         # T/A
//!
//! [source]
//! slit_width_x = 1.0         # mm
//! slit_width_y = 1.0
//! divergence_fwhm_x = 1.0    # deg
//! l1 = 0.965                 # m
//! seed = 7
//!
//! [camera]
//! extent_x = 25.0            # mm
//! pitch = 0.1
//! z = 1.4                    # m
//!
//! [[elements]]
//! kind = "lov_prism"
//! z = 0.965
//! axis = "y"
//! current = 2.5              # A
//!
//! [[elements]]
//! kind = "spin_filter"
//! z = 1.33
//! direction = "-z"
//! ```
//!
//! Any number may also be written as a string carrying its unit, such as
//! `l1 = "0.965 m"`; the unit must be the fixed one for that key.

use std::fmt;
use std::str::FromStr;

use toml::{Table, Value};

use crate::beamline::{AngularDistribution, BeamlineConfig, Camera, SourceModel};
use crate::elements::{
    Element, ElementKind, GradientAxis, GuideRotation, LovPrism, PhysicsParams, ResidualField, Slit, SpinDirection,
    SpinFilter,
};
use crate::error::{Error, Result};
use crate::grid::make_grid;

pub const DEFAULT_POLARIZATION: f64 = 0.94;
pub const DEFAULT_DIVERGENCE_DEG: f64 = 1.0;
pub const DEFAULT_SLIT_MM: f64 = 1.0;
pub const DEFAULT_L1_M: f64 = 0.965;
pub const DEFAULT_CAMERA_EXTENT_MM: f64 = 25.0;
pub const DEFAULT_CAMERA_PITCH_MM: f64 = 0.1;
pub const DEFAULT_CAMERA_Z_M: f64 = 1.6;

/// Packaged scenarios, by name.
pub const SCENARIOS: &[(&str, &str)] = &[
    ("fig2a", include_str!("../scenarios/fig2a.toml")),
    ("fig2b", include_str!("../scenarios/fig2b.toml")),
    ("fig2c", include_str!("../scenarios/fig2c.toml")),
    ("fig3", include_str!("../scenarios/fig3.toml")),
];

pub fn scenario(name: &str) -> Result<&'static str> {
    SCENARIOS.iter().find(|s| s.0 == name).map(|s| s.1).ok_or_else(|| {
        let names: Vec<&str> = SCENARIOS.iter().map(|s| s.0).collect();
        Error::Config(format!("unknown scenario `{name}`{}; available: {}", suggest(name, &names), names.join(", ")))
    })
}

/// Quantity varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// 1-based index into the prism list.
    PrismOffset(usize),
    PrismCurrent(usize),
    PrismPeriod(usize),
    /// Both axes at once.
    Divergence,
    DivergenceX,
    DivergenceY,
    Polarization,
    AnalyzingPower,
}

impl SweepParam {
    pub fn unit(&self) -> &'static str {
        match self {
            SweepParam::PrismOffset(_) | SweepParam::PrismPeriod(_) => "mm",
            SweepParam::PrismCurrent(_) => "A",
            SweepParam::Divergence | SweepParam::DivergenceX | SweepParam::DivergenceY => "deg",
            SweepParam::Polarization | SweepParam::AnalyzingPower => "",
        }
    }

    /// The config with this parameter set to `value`, validated.
    pub fn apply(&self, config: &BeamlineConfig, value: f64) -> Result<BeamlineConfig> {
        let mut c = config.clone();
        let n = c.prisms().count();
        fn prism(c: &mut BeamlineConfig, i: usize, n: usize) -> Result<&mut LovPrism> {
            c.prisms_mut()
                .nth(i.wrapping_sub(1))
                .ok_or_else(|| Error::Config(format!("sweep names prism {i}, beamline has {n}")))
        }
        match *self {
            SweepParam::PrismOffset(i) => prism(&mut c, i, n)?.offset = value,
            SweepParam::PrismCurrent(i) => prism(&mut c, i, n)?.current = value,
            SweepParam::PrismPeriod(i) => prism(&mut c, i, n)?.period_override = Some(value),
            SweepParam::Divergence => {
                c.source.divergence_fwhm_x = value;
                c.source.divergence_fwhm_y = value;
            }
            SweepParam::DivergenceX => c.source.divergence_fwhm_x = value,
            SweepParam::DivergenceY => c.source.divergence_fwhm_y = value,
            SweepParam::Polarization => c.polarization = value,
            SweepParam::AnalyzingPower => {
                let f = c.elements.iter_mut().find_map(|e| match &mut e.kind {
                    ElementKind::SpinFilter(f) => Some(f),
                    _ => None,
                });
                f.ok_or_else(|| Error::Config("sweep over analyzing power needs an analyzer".into()))?
                    .analyzing_power = value;
            }
        }
        c.validate()?;
        Ok(c)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepParam::PrismOffset(i) => write!(f, "prism{i}.offset"),
            SweepParam::PrismCurrent(i) => write!(f, "prism{i}.current"),
            SweepParam::PrismPeriod(i) => write!(f, "prism{i}.period_override"),
            SweepParam::Divergence => f.write_str("source.divergence_fwhm"),
            SweepParam::DivergenceX => f.write_str("source.divergence_fwhm_x"),
            SweepParam::DivergenceY => f.write_str("source.divergence_fwhm_y"),
            SweepParam::Polarization => f.write_str("source.polarization"),
            SweepParam::AnalyzingPower => f.write_str("analyzer.analyzing_power"),
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let fixed = [
            ("source.divergence_fwhm", SweepParam::Divergence),
            ("source.divergence_fwhm_x", SweepParam::DivergenceX),
            ("source.divergence_fwhm_y", SweepParam::DivergenceY),
            ("source.polarization", SweepParam::Polarization),
            ("analyzer.analyzing_power", SweepParam::AnalyzingPower),
        ];
        if let Some(p) = fixed.iter().find(|p| p.0 == s) {
            return Ok(p.1);
        }
        if let Some((head, field)) = s.strip_prefix("prism").and_then(|r| r.split_once('.')) {
            if let Ok(i) = head.parse::<usize>() {
                if i >= 1 {
                    match field {
                        "offset" => return Ok(SweepParam::PrismOffset(i)),
                        "current" => return Ok(SweepParam::PrismCurrent(i)),
                        "period_override" => return Ok(SweepParam::PrismPeriod(i)),
                        _ => {}
                    }
                }
            }
        }
        let mut names: Vec<&str> = fixed.iter().map(|p| p.0).collect();
        names.extend(["prism1.offset", "prism1.current", "prism1.period_override"]);
        Err(Error::Config(format!(
            "unknown sweep parameter `{s}`{}; expected source.divergence_fwhm[_x|_y], source.polarization, \
             analyzer.analyzing_power or prism<N>.{{offset,current,period_override}}",
            suggest(s, &names)
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// A parsed configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub config: BeamlineConfig,
    pub sweep: Option<Sweep>,
    /// One `key = value unit` line per default that was filled in.
    pub defaults: Vec<String>,
}

fn suggest(key: &str, allowed: &[&str]) -> String {
    allowed
        .iter()
        .map(|a| (strsim::levenshtein(key, a), *a))
        .min()
        .filter(|(d, a)| *d <= 3.max(a.len() / 2))
        .map_or(String::new(), |(_, a)| format!(" (did you mean `{a}`?)"))
}

struct Reader<'a> {
    path: String,
    table: &'a Table,
    defaults: &'a mut Vec<String>,
}

impl<'a> Reader<'a> {
    fn new(path: impl Into<String>, table: &'a Table, allowed: &[&str], defaults: &'a mut Vec<String>) -> Result<Self> {
        let path = path.into();
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!("unknown key `{path}.{key}`{}", suggest(key, allowed))));
            }
        }
        Ok(Reader { path, table, defaults })
    }

    fn key(&self, key: &str) -> String {
        format!("{}.{key}", self.path)
    }

    fn num(&self, key: &str, unit: &str) -> Result<Option<f64>> {
        let Some(v) = self.table.get(key) else { return Ok(None) };
        let name = self.key(key);
        match v {
            Value::Float(f) => Ok(Some(*f)),
            Value::Integer(i) => Ok(Some(*i as f64)),
            Value::String(s) => {
                let mut parts = s.split_whitespace();
                let (Some(n), u, None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(Error::Config(format!("`{name}` = \"{s}\" is not `<number> {unit}`")));
                };
                if u.unwrap_or("") != unit {
                    return Err(Error::Config(format!(
                        "`{name}` = \"{s}\": expected unit `{unit}`, got `{}`",
                        u.unwrap_or("")
                    )));
                }
                n.parse::<f64>()
                    .map(Some)
                    .map_err(|_| Error::Config(format!("`{name}` = \"{s}\": `{n}` is not a number")))
            }
            _ => Err(Error::Config(format!("`{name}` must be a number in {unit}"))),
        }
    }

    fn num_or(&mut self, key: &str, unit: &str, default: f64) -> Result<f64> {
        match self.num(key, unit)? {
            Some(v) => Ok(v),
            None => {
                self.defaults.push(format!("{} = {default} {unit}", self.key(key)).trim_end().to_string());
                Ok(default)
            }
        }
    }

    fn required_num(&self, key: &str, unit: &str) -> Result<f64> {
        self.num(key, unit)?.ok_or_else(|| Error::Config(format!("missing `{}` ({unit})", self.key(key))))
    }

    fn string(&self, key: &str) -> Result<Option<&'a str>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(Error::Config(format!("`{}` must be a string", self.key(key)))),
        }
    }

    fn parsed_or<T: FromStr<Err = Error> + fmt::Display>(&mut self, key: &str, default: T) -> Result<T> {
        match self.string(key)? {
            Some(s) => s.parse().map_err(|e: Error| Error::Config(format!("`{}`: {}", self.key(key), detail(&e)))),
            None => {
                self.defaults.push(format!("{} = {default}", self.key(key)));
                Ok(default)
            }
        }
    }

    fn required_parsed<T: FromStr<Err = Error>>(&self, key: &str) -> Result<T> {
        self.string(key)?
            .ok_or_else(|| Error::Config(format!("missing `{}`", self.key(key))))?
            .parse()
            .map_err(|e: Error| Error::Config(format!("`{}`: {}", self.key(key), detail(&e))))
    }

    fn unsigned(&self, key: &str) -> Result<Option<u64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(Value::String(s)) if s.parse::<u64>().is_ok() => Ok(s.parse().ok()),
            Some(_) => Err(Error::Config(format!("`{}` must be a non-negative integer", self.key(key)))),
        }
    }

    fn vector(&self, key: &str) -> Result<[f64; 3]> {
        let bad = || Error::Config(format!("`{}` must be an array of three numbers", self.key(key)));
        let Some(Value::Array(a)) = self.table.get(key) else { return Err(bad()) };
        let v: Vec<f64> = a
            .iter()
            .map(|x| match x {
                Value::Float(f) => Some(*f),
                Value::Integer(i) => Some(*i as f64),
                _ => None,
            })
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        v.try_into().map_err(|_| bad())
    }
}

fn detail(e: &Error) -> String {
    match e {
        Error::Config(s) => s.clone(),
        other => other.to_string(),
    }
}

fn table<'a>(root: &'a Table, key: &str) -> Result<Option<&'a Table>> {
    match root.get(key) {
        None => Ok(None),
        Some(Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(Error::Config(format!("`{key}` must be a table"))),
    }
}

const PRISM_KEYS: &[&str] = &["kind", "label", "z", "axis", "current", "offset", "period_override"];
const GUIDE_KEYS: &[&str] = &["kind", "label", "z", "axis", "angle"];
const RESIDUAL_KEYS: &[&str] = &["kind", "label", "z", "axis", "gradient_x", "gradient_y", "angle"];
const SLIT_KEYS: &[&str] = &["kind", "label", "z", "width_x", "width_y"];
const FILTER_KEYS: &[&str] = &["kind", "label", "z", "direction", "analyzing_power"];
const KINDS: &[&str] = &["lov_prism", "guide_rotation", "residual_field", "slit", "spin_filter"];

fn parse_element(index: usize, t: &Table, defaults: &mut Vec<String>) -> Result<Element> {
    let path = format!("elements[{index}]");
    let kind = match t.get("kind") {
        Some(Value::String(s)) => s.as_str(),
        _ => return Err(Error::Config(format!("`{path}.kind` must be one of {}", KINDS.join(", ")))),
    };
    let allowed = match kind {
        "lov_prism" => PRISM_KEYS,
        "guide_rotation" => GUIDE_KEYS,
        "residual_field" => RESIDUAL_KEYS,
        "slit" => SLIT_KEYS,
        "spin_filter" => FILTER_KEYS,
        other => {
            return Err(Error::Config(format!(
                "unknown element kind `{other}`{}; expected one of {}",
                suggest(other, KINDS),
                KINDS.join(", ")
            )))
        }
    };
    let mut r = Reader::new(path, t, allowed, defaults)?;
    let z = r.required_num("z", "m")?;
    let kind = match kind {
        "lov_prism" => {
            let axis: GradientAxis = r.required_parsed("axis")?;
            let period_override = r.num("period_override", "mm")?;
            let current = if period_override.is_some() { r.num("current", "A")?.unwrap_or(0.0) } else { r.num_or("current", "A", 0.0)? };
            ElementKind::LovPrism(LovPrism { axis, current, offset: r.num_or("offset", "mm", 0.0)?, period_override })
        }
        "guide_rotation" => {
            ElementKind::GuideRotation(GuideRotation { axis: r.vector("axis")?, angle_deg: r.required_num("angle", "deg")? })
        }
        "residual_field" => ElementKind::ResidualField(ResidualField {
            axis: r.vector("axis")?,
            gradient_x: r.num_or("gradient_x", "deg/mm", 0.0)?,
            gradient_y: r.num_or("gradient_y", "deg/mm", 0.0)?,
            angle_deg: r.num_or("angle", "deg", 0.0)?,
        }),
        "slit" => ElementKind::Slit(Slit { width_x: r.required_num("width_x", "mm")?, width_y: r.required_num("width_y", "mm")? }),
        _ => ElementKind::SpinFilter(SpinFilter {
            direction: r.required_parsed("direction")?,
            analyzing_power: r.num_or("analyzing_power", "", SpinFilter::DEFAULT_ANALYZING_POWER)?,
        }),
    };
    let label = r.string("label")?.map(str::to_string);
    Ok(Element { label, z, kind })
}

/// Parses and validates a beamline description, filling defaults.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(format!("invalid TOML: {}", e.message())))?;
    let mut defaults = Vec::new();
    Reader::new("", &root, &["physics", "source", "camera", "elements", "sweep"], &mut defaults)
        .map_err(|e| Error::Config(detail(&e).replace("`.", "`")))?;
    let empty = Table::new();

    let mut r = Reader::new("physics", table(&root, "physics")?.unwrap_or(&empty), &["wavelength", "velocity", "gamma_n", "theta", "b_per_amp"], &mut defaults)?;
    let lambda = r.num_or("wavelength", "nm", PhysicsParams::DEFAULT_LAMBDA_NM)?;
    let base = PhysicsParams::for_wavelength(lambda)?;
    let physics = PhysicsParams {
        lambda_nm: lambda,
        velocity: r.num_or("velocity", "m/s", base.velocity)?,
        gamma_n: r.num_or("gamma_n", "rad/s/T", base.gamma_n)?,
        theta_deg: r.num_or("theta", "deg", base.theta_deg)?,
        b_per_amp: r.num_or("b_per_amp", "T/A", base.b_per_amp)?,
    };

    let source_keys = [
        "slit_width_x", "slit_width_y", "beam_width_x", "beam_width_y", "divergence_fwhm_x", "divergence_fwhm_y", "l1",
        "n_rays", "angular", "seed", "polarization", "initial_direction",
    ];
    let mut r = Reader::new("source", table(&root, "source")?.unwrap_or(&empty), &source_keys, &mut defaults)?;
    let slit_width_x = r.num_or("slit_width_x", "mm", DEFAULT_SLIT_MM)?;
    let slit_width_y = r.num_or("slit_width_y", "mm", DEFAULT_SLIT_MM)?;
    let n_rays = match r.unsigned("n_rays")? {
        Some(n) => n as usize,
        None => {
            r.defaults.push(format!("source.n_rays = {}", SourceModel::DEFAULT_RAYS));
            SourceModel::DEFAULT_RAYS
        }
    };
    let source = SourceModel {
        slit_width_x,
        slit_width_y,
        beam_width_x: r.num_or("beam_width_x", "mm", slit_width_x)?,
        beam_width_y: r.num_or("beam_width_y", "mm", slit_width_y)?,
        divergence_fwhm_x: r.num_or("divergence_fwhm_x", "deg", DEFAULT_DIVERGENCE_DEG)?,
        divergence_fwhm_y: r.num_or("divergence_fwhm_y", "deg", DEFAULT_DIVERGENCE_DEG)?,
        l1: r.num_or("l1", "m", DEFAULT_L1_M)?,
        n_rays,
        angular: r.parsed_or("angular", AngularDistribution::Gaussian)?,
        seed: r.unsigned("seed")?,
    };
    let polarization = r.num_or("polarization", "", DEFAULT_POLARIZATION)?;
    let initial_direction = r.parsed_or("initial_direction", SpinDirection::PlusZ)?;

    let mut r = Reader::new("camera", table(&root, "camera")?.unwrap_or(&empty), &["extent_x", "extent_y", "pitch", "z"], &mut defaults)?;
    let extent_x = r.num_or("extent_x", "mm", DEFAULT_CAMERA_EXTENT_MM)?;
    let extent_y = r.num_or("extent_y", "mm", extent_x)?;
    let pitch = r.num_or("pitch", "mm", DEFAULT_CAMERA_PITCH_MM)?;
    let camera = Camera {
        grid: make_grid(extent_x, extent_y, pitch).map_err(|e| Error::Config(format!("camera: {}", detail(&e))))?,
        z: r.num_or("z", "m", DEFAULT_CAMERA_Z_M)?,
    };

    let elements = match root.get("elements") {
        None => Vec::new(),
        Some(Value::Array(a)) => a
            .iter()
            .enumerate()
            .map(|(i, v)| match v {
                Value::Table(t) => parse_element(i, t, &mut defaults),
                _ => Err(Error::Config(format!("`elements[{i}]` must be a table"))),
            })
            .collect::<Result<_>>()?,
        Some(_) => Err(Error::Config("`elements` must be an array of tables ([[elements]])".into()))?,
    };

    let sweep = match table(&root, "sweep")? {
        None => None,
        Some(t) => {
            let r = Reader::new("sweep", t, &["param", "values"], &mut defaults)?;
            let param: SweepParam = r.required_parsed("param")?;
            let values = match t.get("values") {
                Some(Value::Array(a)) if !a.is_empty() => a
                    .iter()
                    .map(|v| match v {
                        Value::Float(f) => Ok(*f),
                        Value::Integer(i) => Ok(*i as f64),
                        _ => Err(Error::Config(format!("`sweep.values` must be numbers in {}", param.unit()))),
                    })
                    .collect::<Result<Vec<_>>>()?,
                _ => return Err(Error::Config("`sweep.values` must be a non-empty array".into())),
            };
            Some(Sweep { param, values })
        }
    };

    let config = BeamlineConfig { source, physics, elements, camera, polarization, initial_direction };
    config.validate()?;
    if let Some(s) = &sweep {
        for v in &s.values {
            s.param.apply(&config, *v)?;
        }
    }
    Ok(ParsedConfig { config, sweep, defaults })
}

fn float(v: f64) -> Value {
    Value::Float(v)
}

/// TOML text that parses back to the same configuration, with every field explicit.
pub fn serialize(config: &BeamlineConfig, sweep: Option<&Sweep>) -> String {
    let mut root = Table::new();
    let p = &config.physics;
    let mut physics = Table::new();
    physics.insert("wavelength".into(), float(p.lambda_nm));
    physics.insert("velocity".into(), float(p.velocity));
    physics.insert("gamma_n".into(), float(p.gamma_n));
    physics.insert("theta".into(), float(p.theta_deg));
    physics.insert("b_per_amp".into(), float(p.b_per_amp));
    root.insert("physics".into(), Value::Table(physics));

    let s = &config.source;
    let mut source = Table::new();
    for (k, v) in [
        ("slit_width_x", s.slit_width_x),
        ("slit_width_y", s.slit_width_y),
        ("beam_width_x", s.beam_width_x),
        ("beam_width_y", s.beam_width_y),
        ("divergence_fwhm_x", s.divergence_fwhm_x),
        ("divergence_fwhm_y", s.divergence_fwhm_y),
        ("l1", s.l1),
        ("polarization", config.polarization),
    ] {
        source.insert(k.into(), float(v));
    }
    source.insert("n_rays".into(), Value::Integer(s.n_rays as i64));
    source.insert("angular".into(), Value::String(s.angular.to_string()));
    source.insert("initial_direction".into(), Value::String(config.initial_direction.to_string()));
    if let Some(seed) = s.seed {
        let v = i64::try_from(seed).map_or_else(|_| Value::String(seed.to_string()), Value::Integer);
        source.insert("seed".into(), v);
    }
    root.insert("source".into(), Value::Table(source));

    let g = &config.camera.grid;
    let mut camera = Table::new();
    camera.insert("extent_x".into(), float(g.extent_x()));
    camera.insert("extent_y".into(), float(g.extent_y()));
    camera.insert("pitch".into(), float(g.dx()));
    camera.insert("z".into(), float(config.camera.z));
    root.insert("camera".into(), Value::Table(camera));

    let elements = config
        .elements
        .iter()
        .map(|e| {
            let mut t = Table::new();
            t.insert("kind".into(), Value::String(e.kind.name().into()));
            if let Some(l) = &e.label {
                t.insert("label".into(), Value::String(l.clone()));
            }
            t.insert("z".into(), float(e.z));
            let axis = |a: [f64; 3]| Value::Array(a.iter().map(|v| float(*v)).collect());
            match &e.kind {
                ElementKind::LovPrism(p) => {
                    t.insert("axis".into(), Value::String(p.axis.to_string()));
                    t.insert("current".into(), float(p.current));
                    t.insert("offset".into(), float(p.offset));
                    if let Some(a) = p.period_override {
                        t.insert("period_override".into(), float(a));
                    }
                }
                ElementKind::GuideRotation(g) => {
                    t.insert("axis".into(), axis(g.axis));
                    t.insert("angle".into(), float(g.angle_deg));
                }
                ElementKind::ResidualField(r) => {
                    t.insert("axis".into(), axis(r.axis));
                    t.insert("gradient_x".into(), float(r.gradient_x));
                    t.insert("gradient_y".into(), float(r.gradient_y));
                    t.insert("angle".into(), float(r.angle_deg));
                }
                ElementKind::Slit(s) => {
                    t.insert("width_x".into(), float(s.width_x));
                    t.insert("width_y".into(), float(s.width_y));
                }
                ElementKind::SpinFilter(f) => {
                    t.insert("direction".into(), Value::String(f.direction.to_string()));
                    t.insert("analyzing_power".into(), float(f.analyzing_power));
                }
            }
            Value::Table(t)
        })
        .collect();
    root.insert("elements".into(), Value::Array(elements));

    if let Some(s) = sweep {
        let mut t = Table::new();
        t.insert("param".into(), Value::String(s.param.to_string()));
        t.insert("values".into(), Value::Array(s.values.iter().map(|v| float(*v)).collect()));
        root.insert("sweep".into(), Value::Table(t));
    }
    root.to_string()
}
