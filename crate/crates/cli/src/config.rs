//! Run configuration files.
//!
//! A configuration is a TOML document with five flat sections. Every key is
//! optional unless noted; unknown sections and keys are rejected. Lists are
//! written as a single number (repeated along every axis), a quoted
//! comma-separated string such as `"64, 48"`, or a TOML array.
//!
//! ```toml
//! [grid]
//! dims = 1                  # 1, 2 or 3
//! points_per_axis = 128     # even, ≥ 8
//! length_per_axis = 20.0
//!
//! [physics]
//! hbar = 1.0
//! mass = 1.0
//! kT = 0.0
//! potential = "zero"        # or "harmonic", which needs omega
//! omega = 1.0
//! potential_center = 0.0
//!
//! [evolution]
//! dt = 0.001
//! steps = 1000
//! mode = "real"             # or "imaginary"
//! density_floor = 1e-30
//! record_every = 1
//!
//! [scenario]
//! name = "plane_wave"       # required
//! tolerance = 1e-8          # replaces every built-in tolerance
//! seed = 0
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Scenario keys depend on `scenario.name`:
//!
//! | name | keys |
//! |---|---|
//! | `plane_wave` | `mode_index`, `amplitude_re`, `amplitude_im` |
//! | `gausson` | `center` |
//! | `scaling` | `c_re`, `c_im`, `sigma`, `center`, `momentum` |
//! | `factorization` | `x_factor`, `y_factor` (`"gaussian"`, `"gausson"`, `"plane_wave"`), then `x_sigma`, `x_center`, `x_momentum`, `x_mode_index`, `x_amplitude_re`, `x_amplitude_im` and the `y_` twins, as the factor kind needs |
//! | `spreading` | `kt_values` (required, must contain 0), `sigma`, `center`, `momentum` |
//! | `energy_bound_sweep` | `volumes` (required), `points`, `seeds`, `max_iters`, `step_size`, `minimizer_tolerance` |
//! | `relaxation` | `sigma`, `center`, `momentum` |

use std::fmt::{self, Write as _};

use lognls_core::propagator::DEFAULT_DENSITY_FLOOR;
use lognls_core::scenarios::{states, Factor, Packet, ScenarioKind};
use lognls_core::{
    Complex64, EvolutionConfig, GridSpec, MinimizerConfig, Mode, PhysicalParams, PotentialSpec,
    ScenarioSpec,
};
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid TOML: {0}")]
    Syntax(String),
    #[error("unknown section `[{0}]`")]
    UnknownSection(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("`{key}`: expected {expected}, found {found}")]
    Type {
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("`{key}`: {constraint}")]
    Constraint { key: String, constraint: String },
}

fn constraint(key: &str, text: impl Into<String>) -> ConfigError {
    ConfigError::Constraint {
        key: key.to_string(),
        constraint: text.into(),
    }
}

/// A fully resolved run: every default filled in and every precondition of
/// the scenario checked.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub params: PhysicalParams,
    pub evolution: EvolutionConfig,
    pub kind: ScenarioKind,
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub output_dir: Option<String>,
}

impl RunConfig {
    pub fn scenario_name(&self) -> &'static str {
        self.kind.name()
    }

    /// Replaces the seed, including the copy the minimizer carries.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let ScenarioKind::EnergyBoundSweep { minimizer, .. } = &mut self.kind {
            minimizer.seed = seed;
        }
    }

    pub fn spec(&self) -> ScenarioSpec {
        ScenarioSpec {
            kind: self.kind.clone(),
            grid: self.grid,
            params: self.params.clone(),
            evolution: self.evolution,
            tolerance: self.tolerance,
        }
    }
}

/// Pulls typed values out of one section, remembering which keys were used.
struct Section {
    name: &'static str,
    table: Table,
}

fn type_name(v: &Value) -> String {
    match v {
        Value::String(s) => format!("the string {s:?}"),
        Value::Integer(i) => format!("the integer {i}"),
        Value::Float(f) => format!("the float {f}"),
        Value::Boolean(b) => format!("the boolean {b}"),
        Value::Datetime(_) => "a datetime".into(),
        Value::Array(_) => "an array".into(),
        Value::Table(_) => "a table".into(),
    }
}

impl Section {
    fn new(root: &mut Table, name: &'static str) -> Result<Self, ConfigError> {
        let table = match root.remove(name) {
            None => Table::new(),
            Some(Value::Table(t)) => t,
            Some(other) => {
                return Err(ConfigError::Type {
                    key: name.to_string(),
                    expected: "a section",
                    found: type_name(&other),
                })
            }
        };
        Ok(Section { name, table })
    }

    fn key(&self, key: &str) -> String {
        format!("{}.{}", self.name, key)
    }

    fn has(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    fn mismatch(&self, key: &str, expected: &'static str, v: &Value) -> ConfigError {
        ConfigError::Type {
            key: self.key(key),
            expected,
            found: type_name(v),
        }
    }

    fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(f)),
            Some(Value::Integer(i)) => Ok(Some(i as f64)),
            Some(v) => Err(self.mismatch(key, "a number", &v)),
        }
        .and_then(|v| match v {
            Some(f) if !f.is_finite() => Err(constraint(&self.key(key), "must be finite")),
            v => Ok(v),
        })
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    fn opt_int(&mut self, key: &str) -> Result<Option<i64>, ConfigError> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(i)),
            Some(v) => Err(self.mismatch(key, "an integer", &v)),
        }
    }

    fn count(&mut self, key: &str, default: usize, min: usize) -> Result<usize, ConfigError> {
        match self.opt_int(key)? {
            None => Ok(default),
            Some(i) if i >= min as i64 => Ok(i as usize),
            Some(i) => Err(constraint(&self.key(key), format!("must be at least {min} (got {i})"))),
        }
    }

    fn opt_str(&mut self, key: &str) -> Result<Option<String>, ConfigError> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(self.mismatch(key, "a quoted string", &v)),
        }
    }

    fn raw_list(&mut self, key: &str) -> Result<Option<Vec<Value>>, ConfigError> {
        let full = self.key(key);
        let Some(v) = self.table.remove(key) else {
            return Ok(None);
        };
        let items = match v {
            Value::Array(a) => a,
            Value::String(s) => s
                .split(',')
                .map(|part| {
                    let part = part.trim();
                    if let Ok(i) = part.parse::<i64>() {
                        Ok(Value::Integer(i))
                    } else if let Ok(f) = part.parse::<f64>() {
                        Ok(Value::Float(f))
                    } else {
                        Err(ConfigError::Type {
                            key: full.clone(),
                            expected: "a comma-separated list of numbers",
                            found: format!("the string {s:?}"),
                        })
                    }
                })
                .collect::<Result<_, _>>()?,
            scalar => vec![scalar],
        };
        Ok(Some(items))
    }

    fn opt_f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(items) = self.raw_list(key)? else {
            return Ok(None);
        };
        let mut out = Vec::with_capacity(items.len());
        for v in &items {
            let f = match v {
                Value::Float(f) => *f,
                Value::Integer(i) => *i as f64,
                other => return Err(self.mismatch(key, "a list of numbers", other)),
            };
            if !f.is_finite() {
                return Err(constraint(&self.key(key), "entries must be finite"));
            }
            out.push(f);
        }
        Ok(Some(out))
    }

    fn opt_int_list(&mut self, key: &str) -> Result<Option<Vec<i64>>, ConfigError> {
        let Some(items) = self.raw_list(key)? else {
            return Ok(None);
        };
        items
            .iter()
            .map(|v| match v {
                Value::Integer(i) => Ok(*i),
                other => Err(self.mismatch(key, "a list of integers", other)),
            })
            .collect::<Result<_, _>>()
            .map(Some)
    }

    /// A per-axis list: a single entry is repeated along every axis.
    fn axis_f64(&mut self, key: &str, dims: usize, default: f64) -> Result<Vec<f64>, ConfigError> {
        let list = self.opt_f64_list(key)?.unwrap_or_else(|| vec![default]);
        broadcast(&self.key(key), list, dims)
    }

    fn axis_int(&mut self, key: &str, dims: usize, default: i64) -> Result<Vec<i64>, ConfigError> {
        let list = self.opt_int_list(key)?.unwrap_or_else(|| vec![default]);
        broadcast(&self.key(key), list, dims)
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.table.keys().next() {
            Some(k) => Err(ConfigError::UnknownKey(self.key(k))),
            None => Ok(()),
        }
    }
}

fn broadcast<T: Copy>(key: &str, list: Vec<T>, dims: usize) -> Result<Vec<T>, ConfigError> {
    match list.len() {
        1 => Ok(vec![list[0]; dims]),
        n if n == dims => Ok(list),
        n => Err(constraint(key, format!("needs 1 or {dims} entries (got {n})"))),
    }
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(constraint(key, format!("must be positive (got {v})")))
    }
}

fn no_extra(section: &Section, keys: &[&str], why: &str) -> Result<(), ConfigError> {
    match keys.iter().find(|k| section.has(k)) {
        Some(k) => Err(constraint(&section.key(k), format!("only used {why}"))),
        None => Ok(()),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Syntax(e.message().to_string()))?;

    let mut grid_sec = Section::new(&mut root, "grid")?;
    let mut phys = Section::new(&mut root, "physics")?;
    let mut evo = Section::new(&mut root, "evolution")?;
    let mut scen = Section::new(&mut root, "scenario")?;
    let mut out = Section::new(&mut root, "output")?;
    if let Some(name) = root.keys().next() {
        return Err(ConfigError::UnknownSection(name.clone()));
    }

    let grid = parse_grid(&mut grid_sec)?;
    grid_sec.finish()?;
    let dims = grid.dims();

    let params = parse_physics(&mut phys, dims)?;
    phys.finish()?;

    let evolution = parse_evolution(&mut evo)?;
    evo.finish()?;

    let name = scen
        .opt_str("name")?
        .ok_or_else(|| ConfigError::Missing("scenario.name".into()))?;
    let tolerance = match scen.opt_f64("tolerance")? {
        Some(t) if t < 0.0 => return Err(constraint("scenario.tolerance", "must be ≥ 0")),
        t => t,
    };
    let seed = match scen.opt_int("seed")? {
        None => 0,
        Some(s) if s >= 0 => s as u64,
        Some(_) => return Err(constraint("scenario.seed", "must be ≥ 0")),
    };
    let kind = parse_scenario(&mut scen, &name, &grid, &params, &evolution, seed)?;
    scen.finish()?;

    let output_dir = out.opt_str("dir")?;
    out.finish()?;

    Ok(RunConfig {
        grid,
        params,
        evolution,
        kind,
        tolerance,
        seed,
        output_dir,
    })
}

fn parse_grid(sec: &mut Section) -> Result<GridSpec, ConfigError> {
    let dims = sec.count("dims", 1, 1)?;
    if dims > 3 {
        return Err(constraint("grid.dims", format!("must be 1, 2 or 3 (got {dims})")));
    }
    let points = sec.axis_int("points_per_axis", dims, 128)?;
    for &n in &points {
        if n < 8 || n % 2 != 0 {
            return Err(constraint(
                "grid.points_per_axis",
                format!("must be even, ≥ 8 (got {n})"),
            ));
        }
    }
    let lengths = sec.axis_f64("length_per_axis", dims, 20.0)?;
    for &l in &lengths {
        positive("grid.length_per_axis", l)?;
    }
    let points: Vec<usize> = points.iter().map(|&n| n as usize).collect();
    GridSpec::new(&points, &lengths).map_err(|e| constraint("grid", e.to_string()))
}

fn parse_physics(sec: &mut Section, dims: usize) -> Result<PhysicalParams, ConfigError> {
    let hbar = positive("physics.hbar", sec.f64("hbar", 1.0)?)?;
    let mass = positive("physics.mass", sec.f64("mass", 1.0)?)?;
    let kt = sec.f64("kT", 0.0)?;
    let kind = sec.opt_str("potential")?.unwrap_or_else(|| "zero".into());
    let potential = match kind.as_str() {
        "zero" => {
            no_extra(sec, &["omega", "potential_center"], "with potential = \"harmonic\"")?;
            PotentialSpec::Zero
        }
        "harmonic" => {
            if !sec.has("omega") {
                return Err(ConfigError::Missing("physics.omega".into()));
            }
            let omega = sec.axis_f64("omega", dims, 1.0)?;
            for &w in &omega {
                positive("physics.omega", w)?;
            }
            let center = sec.axis_f64("potential_center", dims, 0.0)?;
            PotentialSpec::Harmonic { omega, center }
        }
        other => {
            return Err(constraint(
                "physics.potential",
                format!("must be \"zero\" or \"harmonic\" (got {other:?})"),
            ))
        }
    };
    Ok(PhysicalParams {
        hbar,
        mass,
        kt,
        potential,
    })
}

fn parse_evolution(sec: &mut Section) -> Result<EvolutionConfig, ConfigError> {
    let dt = positive("evolution.dt", sec.f64("dt", 1e-3)?)?;
    let steps = sec.count("steps", 1000, 1)?;
    let mode = match sec.opt_str("mode")?.as_deref() {
        None | Some("real") => Mode::RealTime,
        Some("imaginary") => Mode::ImaginaryTime,
        Some(other) => {
            return Err(constraint(
                "evolution.mode",
                format!("must be \"real\" or \"imaginary\" (got {other:?})"),
            ))
        }
    };
    let density_floor = positive(
        "evolution.density_floor",
        sec.f64("density_floor", DEFAULT_DENSITY_FLOOR)?,
    )?;
    let record_every = sec.count("record_every", 1, 1)?;
    if record_every > steps {
        return Err(constraint(
            "evolution.record_every",
            format!("must not exceed evolution.steps ({steps})"),
        ));
    }
    Ok(EvolutionConfig {
        dt,
        steps,
        mode,
        density_floor,
        record_every,
    })
}

const PACKET_KEYS: [&str; 3] = ["sigma", "center", "momentum"];

fn parse_packet(sec: &mut Section, prefix: &str, dims: usize) -> Result<Packet, ConfigError> {
    let sigma_key = format!("{prefix}sigma");
    let sigma = positive(&sec.key(&sigma_key), sec.f64(&sigma_key, 1.0)?)?;
    Ok(Packet {
        sigma,
        center: sec.axis_f64(&format!("{prefix}center"), dims, 0.0)?,
        momentum: sec.axis_f64(&format!("{prefix}momentum"), dims, 0.0)?,
    })
}

fn parse_amplitude(sec: &mut Section, prefix: &str) -> Result<Complex64, ConfigError> {
    let a = Complex64::new(
        sec.f64(&format!("{prefix}amplitude_re"), 1.0)?,
        sec.f64(&format!("{prefix}amplitude_im"), 0.0)?,
    );
    if a.norm() == 0.0 {
        return Err(constraint(&sec.key(&format!("{prefix}amplitude_re")), "amplitude must be nonzero"));
    }
    Ok(a)
}

fn check_modes(key: &str, grid: &GridSpec, modes: &[i64]) -> Result<(), ConfigError> {
    states::plane_wave_vector(grid, modes)
        .map(|_| ())
        .map_err(|_| constraint(key, "each |mode| must stay below points_per_axis / 2"))
}

fn require_mode(name: &str, evolution: &EvolutionConfig, want: Mode) -> Result<(), ConfigError> {
    if evolution.mode != want {
        let text = match want {
            Mode::RealTime => "real",
            Mode::ImaginaryTime => "imaginary",
        };
        return Err(constraint(
            "evolution.mode",
            format!("scenario {name:?} needs mode = \"{text}\""),
        ));
    }
    Ok(())
}

fn parse_scenario(
    sec: &mut Section,
    name: &str,
    grid: &GridSpec,
    params: &PhysicalParams,
    evolution: &EvolutionConfig,
    seed: u64,
) -> Result<ScenarioKind, ConfigError> {
    let dims = grid.dims();
    match name {
        "relaxation" => require_mode(name, evolution, Mode::ImaginaryTime)?,
        "energy_bound_sweep" => {}
        _ => require_mode(name, evolution, Mode::RealTime)?,
    }
    let kind = match name {
        "plane_wave" => {
            if params.potential != PotentialSpec::Zero {
                return Err(constraint("physics.potential", "plane_wave needs potential = \"zero\""));
            }
            let mode = sec.axis_int("mode_index", dims, 1)?;
            check_modes("scenario.mode_index", grid, &mode)?;
            ScenarioKind::PlaneWave {
                mode,
                amplitude: parse_amplitude(sec, "")?,
            }
        }
        "gausson" => {
            if params.kt >= 0.0 {
                return Err(constraint("physics.kT", "gausson needs kT < 0"));
            }
            let center = sec.axis_f64("center", dims, 0.0)?;
            if !center.iter().enumerate().all(|(a, &c)| grid.contains(a, c)) {
                return Err(constraint("scenario.center", "must lie inside the box"));
            }
            ScenarioKind::Gausson { center }
        }
        "scaling" => {
            let c = Complex64::new(sec.f64("c_re", 2.0)?, sec.f64("c_im", 0.0)?);
            if c.norm() == 0.0 {
                return Err(constraint("scenario.c_re", "c must be nonzero"));
            }
            ScenarioKind::ScalingCovariance {
                c,
                packet: parse_packet(sec, "", dims)?,
            }
        }
        "factorization" => {
            if dims != 2 {
                return Err(constraint("grid.dims", "factorization needs dims = 2"));
            }
            let x = parse_factor(sec, "x_", 0, grid, params)?;
            let y = parse_factor(sec, "y_", 1, grid, params)?;
            ScenarioKind::Factorization { x, y }
        }
        "spreading" => {
            let kt_values = sec
                .opt_f64_list("kt_values")?
                .ok_or_else(|| ConfigError::Missing("scenario.kt_values".into()))?;
            if !kt_values.contains(&0.0) {
                return Err(constraint("scenario.kt_values", "must include 0"));
            }
            ScenarioKind::SpreadingComparison {
                kt_values,
                packet: parse_packet(sec, "", dims)?,
            }
        }
        "energy_bound_sweep" => {
            let volumes = sec
                .opt_f64_list("volumes")?
                .ok_or_else(|| ConfigError::Missing("scenario.volumes".into()))?;
            for &v in &volumes {
                positive("scenario.volumes", v)?;
            }
            let points = sec.count("points", 64, 8)?;
            if points % 2 != 0 {
                return Err(constraint("scenario.points", format!("must be even, ≥ 8 (got {points})")));
            }
            let seeds = sec.count("seeds", 10, 1)? as u64;
            let defaults = MinimizerConfig::default();
            let minimizer = MinimizerConfig {
                max_iters: sec.count("max_iters", defaults.max_iters, 1)?,
                tolerance: positive(
                    "scenario.minimizer_tolerance",
                    sec.f64("minimizer_tolerance", defaults.tolerance)?,
                )?,
                step_size: sec.f64("step_size", defaults.step_size)?,
                seed,
            };
            if !(minimizer.step_size > 0.0 && minimizer.step_size <= 1.0) {
                return Err(constraint("scenario.step_size", "must lie in (0, 1]"));
            }
            ScenarioKind::EnergyBoundSweep {
                volumes,
                points,
                seeds,
                minimizer,
            }
        }
        "relaxation" => ScenarioKind::Relaxation {
            packet: parse_packet(sec, "", dims)?,
        },
        other => {
            return Err(constraint(
                "scenario.name",
                format!(
                    "unknown scenario {other:?}; expected one of plane_wave, gausson, scaling, \
                     factorization, spreading, energy_bound_sweep, relaxation"
                ),
            ))
        }
    };
    Ok(kind)
}

fn parse_factor(
    sec: &mut Section,
    prefix: &str,
    axis: usize,
    grid: &GridSpec,
    params: &PhysicalParams,
) -> Result<Factor, ConfigError> {
    let key = format!("{prefix}factor");
    let kind = sec
        .opt_str(&key)?
        .ok_or_else(|| ConfigError::Missing(sec.key(&key)))?;
    let keys = |names: &[&str]| -> Vec<String> { names.iter().map(|n| format!("{prefix}{n}")).collect() };
    let packet_keys = keys(&PACKET_KEYS);
    let wave_keys = keys(&["mode_index", "amplitude_re", "amplitude_im"]);
    let unused = |sec: &Section, list: &[String]| -> Result<(), ConfigError> {
        let refs: Vec<&str> = list.iter().map(String::as_str).collect();
        no_extra(sec, &refs, &format!("by other {key} kinds"))
    };
    let line = grid.axis_grid(axis).map_err(|e| constraint("grid", e.to_string()))?;
    match kind.as_str() {
        "gaussian" => {
            unused(sec, &wave_keys)?;
            let p = parse_packet(sec, prefix, 1)?;
            Ok(Factor::Gaussian(p))
        }
        "gausson" => {
            unused(sec, &wave_keys)?;
            unused(sec, &packet_keys[..1])?;
            unused(sec, &packet_keys[2..])?;
            if params.kt >= 0.0 {
                return Err(constraint("physics.kT", "a gausson factor needs kT < 0"));
            }
            let center = sec.f64(&format!("{prefix}center"), 0.0)?;
            Ok(Factor::Gausson { center })
        }
        "plane_wave" => {
            unused(sec, &packet_keys)?;
            let mode = sec.opt_int(&format!("{prefix}mode_index"))?.unwrap_or(1);
            check_modes(&sec.key(&format!("{prefix}mode_index")), &line, &[mode])?;
            Ok(Factor::PlaneWave {
                mode,
                amplitude: parse_amplitude(sec, prefix)?,
            })
        }
        other => Err(constraint(
            &sec.key(&key),
            format!("must be \"gaussian\", \"gausson\" or \"plane_wave\" (got {other:?})"),
        )),
    }
}

/// Shortest decimal text that parses back to the same `f64`.
struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A per-axis list: a bare scalar when every entry agrees, since a scalar
/// is repeated along every axis.
fn list<T: fmt::Debug + PartialEq>(items: &[T]) -> String {
    if items.windows(2).all(|w| w[0] == w[1]) {
        return format!("{:?}", items[0]);
    }
    values(items)
}

/// A list whose length matters: a quoted comma-separated string.
fn values<T: fmt::Debug>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(|v| format!("{v:?}")).collect();
    format!("\"{}\"", parts.join(", "))
}

impl RunConfig {
    /// Canonical text with every default written out. Parsing it yields a
    /// configuration equal to `self`.
    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        let g = &self.grid;
        let dims = g.dims();
        let _ = writeln!(s, "[grid]\ndims = {dims}");
        let _ = writeln!(s, "points_per_axis = {}", list(g.points()));
        let _ = writeln!(s, "length_per_axis = {}", list(g.lengths()));

        let p = &self.params;
        let _ = writeln!(s, "\n[physics]\nhbar = {}\nmass = {}\nkT = {}", Num(p.hbar), Num(p.mass), Num(p.kt));
        match &p.potential {
            PotentialSpec::Harmonic { omega, center } => {
                let _ = writeln!(s, "potential = \"harmonic\"\nomega = {}", list(omega));
                let _ = writeln!(s, "potential_center = {}", list(center));
            }
            _ => {
                let _ = writeln!(s, "potential = \"zero\"");
            }
        }

        let e = &self.evolution;
        let mode = match e.mode {
            Mode::RealTime => "real",
            Mode::ImaginaryTime => "imaginary",
        };
        let _ = writeln!(
            s,
            "\n[evolution]\ndt = {}\nsteps = {}\nmode = \"{mode}\"\ndensity_floor = {}\nrecord_every = {}",
            Num(e.dt),
            e.steps,
            Num(e.density_floor),
            e.record_every
        );

        let _ = writeln!(s, "\n[scenario]\nname = \"{}\"", self.scenario_name());
        if let Some(t) = self.tolerance {
            let _ = writeln!(s, "tolerance = {}", Num(t));
        }
        let _ = writeln!(s, "seed = {}", self.seed);
        write_scenario(&mut s, &self.kind);

        if let Some(dir) = &self.output_dir {
            let _ = writeln!(s, "\n[output]\ndir = {}", Value::String(dir.clone()));
        }
        s
    }
}

fn write_packet(s: &mut String, prefix: &str, p: &Packet) {
    let _ = writeln!(s, "{prefix}sigma = {}", Num(p.sigma));
    let _ = writeln!(s, "{prefix}center = {}", list(&p.center));
    let _ = writeln!(s, "{prefix}momentum = {}", list(&p.momentum));
}

fn write_amplitude(s: &mut String, prefix: &str, a: Complex64) {
    let _ = writeln!(s, "{prefix}amplitude_re = {}\n{prefix}amplitude_im = {}", Num(a.re), Num(a.im));
}

fn write_scenario(s: &mut String, kind: &ScenarioKind) {
    match kind {
        ScenarioKind::PlaneWave { mode, amplitude } => {
            let _ = writeln!(s, "mode_index = {}", list(mode));
            write_amplitude(s, "", *amplitude);
        }
        ScenarioKind::Gausson { center } => {
            let _ = writeln!(s, "center = {}", list(center));
        }
        ScenarioKind::ScalingCovariance { c, packet } => {
            let _ = writeln!(s, "c_re = {}\nc_im = {}", Num(c.re), Num(c.im));
            write_packet(s, "", packet);
        }
        ScenarioKind::Factorization { x, y } => {
            for (prefix, factor) in [("x_", x), ("y_", y)] {
                match factor {
                    Factor::Gaussian(p) => {
                        let _ = writeln!(s, "{prefix}factor = \"gaussian\"");
                        write_packet(s, prefix, p);
                    }
                    Factor::Gausson { center } => {
                        let _ = writeln!(s, "{prefix}factor = \"gausson\"\n{prefix}center = {}", Num(*center));
                    }
                    Factor::PlaneWave { mode, amplitude } => {
                        let _ = writeln!(s, "{prefix}factor = \"plane_wave\"\n{prefix}mode_index = {mode}");
                        write_amplitude(s, prefix, *amplitude);
                    }
                }
            }
        }
        ScenarioKind::SpreadingComparison { kt_values, packet } => {
            let _ = writeln!(s, "kt_values = {}", values(kt_values));
            write_packet(s, "", packet);
        }
        ScenarioKind::EnergyBoundSweep {
            volumes,
            points,
            seeds,
            minimizer,
        } => {
            let _ = writeln!(s, "volumes = {}\npoints = {points}\nseeds = {seeds}", values(volumes));
            let _ = writeln!(
                s,
                "max_iters = {}\nstep_size = {}\nminimizer_tolerance = {}",
                minimizer.max_iters,
                Num(minimizer.step_size),
                Num(minimizer.tolerance)
            );
        }
        ScenarioKind::Relaxation { packet } => write_packet(s, "", packet),
    }
}
