//! Line-oriented `key = value` experiment configuration.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use qbattery::closed::{DEFAULT_GRID_POINTS, DEFAULT_JUMP_THRESHOLD};
use qbattery::open::{
    DEFAULT_DEPHASING, DEFAULT_DT, DEFAULT_HERMITICITY_TOL, DEFAULT_RECORD_STRIDE, DEFAULT_STEADY_REL_TOL,
    DEFAULT_STEADY_WINDOW, DEFAULT_TRACE_TOL, DEFAULT_T_MAX,
};
use qbattery::scaling::DEFAULT_MARGIN;
use qbattery::{ChargeAxis, IntegratorConfig, SteadyStop, SweepParam};
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

/// Smallest and largest chain length accepted by the open modes.
pub const MIN_SITES: usize = 2;
pub const MAX_SITES: usize = 8;

pub const DEFAULT_K: f64 = 7.0 * PI / 8.0;

pub const KNOWN_KEYS: &[&str] = &[
    "mode",
    "figure",
    "model.N",
    "model.N_range",
    "model.J",
    "model.delta",
    "model.Gamma",
    "model.gamma",
    "model.B",
    "model.k",
    "charge.omega",
    "charge.axis",
    "noise.g",
    "bath.T",
    "integrate.dt",
    "integrate.t_max",
    "integrate.record_stride",
    "integrate.trace_tol",
    "integrate.hermiticity_tol",
    "integrate.steady_stop",
    "integrate.steady_window",
    "integrate.steady_rel_tol",
    "integrate.time_points",
    "sweep.param",
    "sweep.min",
    "sweep.max",
    "sweep.points",
    "sweep.curve_param",
    "sweep.curve_values",
    "sweep.threshold",
    "fit.margin",
    "output.dir",
];

/// Keys of the open integrator; figure mode passes them through to presets.
const INTEGRATE_KEYS: &[&str] = &[
    "integrate.dt",
    "integrate.t_max",
    "integrate.record_stride",
    "integrate.trace_tol",
    "integrate.hermiticity_tol",
    "integrate.steady_stop",
    "integrate.steady_window",
    "integrate.steady_rel_tol",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    ClosedSweep,
    OpenRun,
    OpenScaling,
    Figure,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::ClosedSweep => "closed_sweep",
            Mode::OpenRun => "open_run",
            Mode::OpenScaling => "open_scaling",
            Mode::Figure => "figure",
        }
    }

    fn is_open(self) -> bool {
        matches!(self, Mode::OpenRun | Mode::OpenScaling)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "closed_sweep" => Ok(Mode::ClosedSweep),
            "open_run" => Ok(Mode::OpenRun),
            "open_scaling" => Ok(Mode::OpenScaling),
            "figure" => Ok(Mode::Figure),
            other => Err(format!(
                "unknown mode `{other}` (expected closed_sweep, open_run, open_scaling or figure)"
            )),
        }
    }
}

/// Hamiltonian couplings shared by the closed and open modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub j_coupling: f64,
    pub delta: f64,
    pub gamma_cap: f64,
    pub gamma: f64,
    pub b_field: f64,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub grid: Vec<f64>,
    pub curve_param: Option<SweepParam>,
    pub curve_values: Vec<f64>,
    pub threshold: f64,
}

/// One resolved parameter as it appears in the run manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamEntry {
    pub value: Value,
    pub assumed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub figure: Option<u32>,
    pub model: ModelParams,
    /// Chain lengths of the open modes, ascending.
    pub sizes: Vec<usize>,
    pub temperature: f64,
    pub omega: f64,
    pub axis: ChargeAxis,
    pub g: f64,
    pub integrator: IntegratorConfig,
    /// Points of the closed-system time grid over one period.
    pub time_points: usize,
    pub sweep: Option<SweepSpec>,
    pub margin: f64,
    pub out_dir: Option<PathBuf>,
    /// Every consumed key with its resolved value.
    pub params: BTreeMap<String, ParamEntry>,
    /// `integrate.*` lines handed on to figure presets.
    pub passthrough: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

impl ExperimentConfig {
    pub fn assumptions(&self) -> impl Iterator<Item = (&str, &ParamEntry)> {
        self.params.iter().filter(|(_, p)| p.assumed).map(|(k, p)| (k.as_str(), p))
    }

    /// Flags `key` as an assumption with an explanatory note.
    pub fn mark_assumed(&mut self, key: &str, note: &str) {
        if let Some(entry) = self.params.get_mut(key) {
            entry.assumed = true;
            entry.note = Some(note.to_string());
        }
    }
}

/// Values given on the command line; they take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct RawEntry {
    value: String,
    /// 0 for values from the command line.
    line: usize,
}

fn split_lines(text: &str) -> Result<BTreeMap<String, RawEntry>> {
    let mut raw = BTreeMap::new();
    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        let content = full.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(CliError::ConfigSyntax {
                line,
                reason: format!("expected `key = value`, found `{content}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(CliError::ConfigSyntax {
                line,
                reason: format!("malformed key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(CliError::ConfigSyntax {
                line,
                reason: format!("missing value for `{key}`"),
            });
        }
        let entry = RawEntry {
            value: value.to_string(),
            line,
        };
        if let Some(prev) = raw.insert(key.to_string(), entry) {
            return Err(CliError::ConfigSyntax {
                line,
                reason: format!("`{key}` already set on line {}", prev.line),
            });
        }
    }
    Ok(raw)
}

/// A real number, optionally written as a multiple of π: `0.5`, `pi/4`,
/// `7pi/8`, `-2*pi`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let value = match s.find("pi").or_else(|| s.find('π')) {
        None => s.parse::<f64>().ok()?,
        Some(pos) => {
            let pi_len = if s[pos..].starts_with("pi") { 2 } else { 'π'.len_utf8() };
            let head = s[..pos].trim().trim_end_matches('*').trim();
            let tail = s[pos + pi_len..].trim();
            let factor = match head {
                "" | "+" => 1.0,
                "-" => -1.0,
                h => h.parse::<f64>().ok()?,
            };
            let divisor = if tail.is_empty() {
                1.0
            } else {
                tail.strip_prefix('/')?.trim().parse::<f64>().ok()?
            };
            factor * PI / divisor
        }
    };
    value.is_finite().then_some(value)
}

fn real_list(s: &str) -> Option<Vec<f64>> {
    s.split(',').map(parse_real).collect()
}

fn size_range(s: &str) -> Option<(usize, usize)> {
    let (a, b) = s.split_once("..")?;
    let b = b.strip_prefix('=').unwrap_or(b);
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Grid of `points` evenly spaced values with both ends exact.
pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let step = (max - min) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { max } else { min + step * i as f64 })
        .collect()
}

/// Rejects values whose literal form does not fit the key, before any
/// cross-key validation.
fn check_syntax(raw: &BTreeMap<String, RawEntry>) -> Result<()> {
    for (key, entry) in raw {
        let v = entry.value.as_str();
        let (ok, what) = match key.as_str() {
            "figure" | "model.N" | "integrate.record_stride" | "integrate.steady_window" | "integrate.time_points"
            | "sweep.points" => (v.parse::<usize>().is_ok(), "a non-negative integer"),
            "model.N_range" => (size_range(v).is_some(), "a size range such as `2..8`"),
            "integrate.steady_stop" => (v.parse::<bool>().is_ok(), "`true` or `false`"),
            "sweep.curve_values" => (real_list(v).is_some(), "a comma-separated list of reals"),
            "mode" | "charge.axis" | "sweep.param" | "sweep.curve_param" | "output.dir" => (true, ""),
            _ => (parse_real(v).is_some(), "a real number"),
        };
        if !ok {
            return Err(CliError::ConfigSyntax {
                line: entry.line,
                reason: format!("`{key} = {v}` is not {what}"),
            });
        }
    }
    Ok(())
}

fn model_key(param: SweepParam) -> &'static str {
    match param {
        SweepParam::J => "model.J",
        SweepParam::Delta => "model.delta",
        SweepParam::GammaCap => "model.Gamma",
        SweepParam::Gamma => "model.gamma",
        SweepParam::B => "model.B",
        SweepParam::T => "bath.T",
        SweepParam::K => "model.k",
    }
}

/// Tracks which raw entries were consumed and records resolved values.
struct Resolver {
    raw: BTreeMap<String, RawEntry>,
    used: BTreeSet<String>,
    params: BTreeMap<String, ParamEntry>,
}

impl Resolver {
    fn take(&mut self, key: &str) -> Option<RawEntry> {
        self.used.insert(key.to_string());
        self.raw.get(key).cloned()
    }

    fn record(&mut self, key: &str, value: Value, assumed: bool) {
        self.params.insert(
            key.to_string(),
            ParamEntry {
                value,
                assumed,
                note: None,
            },
        );
    }

    fn syntax(entry: &RawEntry, key: &str, what: &str) -> CliError {
        let reason = format!("`{key} = {}` is not {what}", entry.value);
        if entry.line == 0 {
            CliError::validation(key, reason)
        } else {
            CliError::ConfigSyntax {
                line: entry.line,
                reason,
            }
        }
    }

    fn parsed<T>(&mut self, key: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(entry) => match parse(&entry.value) {
                Some(v) => Ok(Some(v)),
                None => Err(Self::syntax(&entry, key, what)),
            },
        }
    }

    fn real(&mut self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.parsed(key, "a real number", parse_real)? {
            Some(v) => {
                self.record(key, Value::from(v), false);
                Ok(v)
            }
            None => match default {
                Some(v) => {
                    self.record(key, Value::from(v), true);
                    Ok(v)
                }
                None => Err(CliError::validation(key, "required but missing")),
            },
        }
    }

    fn count(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.parsed(key, "a non-negative integer", |s| s.parse::<usize>().ok())? {
            Some(v) => {
                self.record(key, Value::from(v), false);
                Ok(v)
            }
            None => {
                self.record(key, Value::from(default), true);
                Ok(default)
            }
        }
    }

    fn flag(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.parsed(key, "`true` or `false`", |s| s.parse::<bool>().ok())? {
            Some(v) => {
                self.record(key, Value::from(v), false);
                Ok(v)
            }
            None => {
                self.record(key, Value::from(default), true);
                Ok(default)
            }
        }
    }

    fn sweep_param(&mut self, key: &str) -> Result<Option<SweepParam>> {
        let param = self.parsed(key, "a sweep parameter (J, delta, Gamma, gamma, B, T, k)", |s| s.parse().ok())?;
        if let Some(p) = param {
            self.record(key, Value::from(SweepParam::name(p)), false);
        }
        Ok(param)
    }
}

fn require(cond: bool, key: &str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::validation(key, reason))
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<ExperimentConfig> {
    let raw = split_lines(text)?;
    if let Some(key) = raw.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(CliError::validation(key, "unknown key"));
    }
    check_syntax(&raw)?;
    let mut r = Resolver {
        raw,
        used: BTreeSet::new(),
        params: BTreeMap::new(),
    };
    let mode: Mode = match r.take("mode") {
        None => return Err(CliError::validation("mode", "required but missing")),
        Some(entry) => entry
            .value
            .parse()
            .map_err(|reason: String| CliError::validation("mode", reason))?,
    };
    r.record("mode", Value::from(mode.name()), false);

    let mut warnings = Vec::new();
    let cli_value = |v: f64| RawEntry {
        value: format!("{v:e}"),
        line: 0,
    };
    for (key, value) in [("integrate.dt", overrides.dt), ("integrate.t_max", overrides.t_max)] {
        if let Some(v) = value {
            if mode.is_open() || mode == Mode::Figure {
                r.raw.insert(key.to_string(), cli_value(v));
            } else {
                warnings.push(format!("{key} override ignored: mode {mode} has no time integration"));
            }
        }
    }

    let out_dir = match &overrides.out_dir {
        Some(dir) => Some(dir.clone()),
        None => r.take("output.dir").map(|e| PathBuf::from(e.value)),
    };
    r.used.insert("output.dir".into());
    if let Some(dir) = &out_dir {
        r.record("output.dir", Value::from(dir.display().to_string()), false);
    }

    let mut cfg = ExperimentConfig {
        mode,
        figure: None,
        model: ModelParams {
            j_coupling: 0.0,
            delta: 0.0,
            gamma_cap: 0.0,
            gamma: 0.0,
            b_field: 0.0,
            k: DEFAULT_K,
        },
        sizes: Vec::new(),
        temperature: 0.0,
        omega: 0.0,
        axis: ChargeAxis::X,
        g: 0.0,
        integrator: IntegratorConfig::default(),
        time_points: DEFAULT_GRID_POINTS,
        sweep: None,
        margin: DEFAULT_MARGIN,
        out_dir,
        params: BTreeMap::new(),
        passthrough: Vec::new(),
        warnings,
    };

    match mode {
        Mode::Figure => {
            let id = r
                .parsed("figure", "a figure number", |s| s.parse::<u32>().ok())?
                .ok_or_else(|| CliError::validation("figure", "required in mode figure"))?;
            if !(1..=9).contains(&id) {
                return Err(CliError::UnknownFigure(id));
            }
            r.record("figure", Value::from(id), false);
            cfg.figure = Some(id);
            for &key in INTEGRATE_KEYS {
                if let Some(entry) = r.take(key) {
                    cfg.passthrough.push((key.to_string(), entry.value));
                }
            }
        }
        Mode::ClosedSweep => resolve_closed(&mut r, &mut cfg)?,
        Mode::OpenRun | Mode::OpenScaling => resolve_open(&mut r, &mut cfg)?,
    }

    if let Some(key) = r.raw.keys().find(|k| !r.used.contains(k.as_str())) {
        return Err(CliError::validation(key, format!("not used in mode {mode}")));
    }
    cfg.params = r.params;
    Ok(cfg)
}

/// Couplings, field, drive and bath shared by the closed and open modes.
/// `swept` keys are left to the sweep and must not be set.
fn resolve_physics(r: &mut Resolver, cfg: &mut ExperimentConfig, swept: &[SweepParam]) -> Result<()> {
    let is_swept = |p: SweepParam| swept.contains(&p);
    let coupling = |r: &mut Resolver, param: SweepParam| -> Result<f64> {
        let key = model_key(param);
        if is_swept(param) {
            if r.raw.contains_key(key) {
                return Err(CliError::validation(key, "is varied by the sweep and must not be set"));
            }
            r.used.insert(key.to_string());
            return Ok(0.0);
        }
        r.real(key, Some(0.0))
    };
    cfg.model.j_coupling = coupling(r, SweepParam::J)?;
    cfg.model.delta = coupling(r, SweepParam::Delta)?;
    cfg.model.gamma_cap = coupling(r, SweepParam::GammaCap)?;
    cfg.model.gamma = coupling(r, SweepParam::Gamma)?;
    cfg.model.b_field = coupling(r, SweepParam::B)?;

    if is_swept(SweepParam::T) {
        if r.raw.contains_key("bath.T") {
            return Err(CliError::validation("bath.T", "is varied by the sweep and must not be set"));
        }
        r.used.insert("bath.T".into());
    } else {
        cfg.temperature = r.real("bath.T", None)?;
        require(cfg.temperature > 0.0, "bath.T", "temperature must be positive")?;
    }

    cfg.omega = r.real("charge.omega", None)?;
    require(cfg.omega > 0.0, "charge.omega", "charging strength must be positive")?;
    cfg.axis = match r.parsed("charge.axis", "`x` or `y`", |s| s.parse::<ChargeAxis>().ok())? {
        Some(a) => {
            r.record("charge.axis", Value::from(a.to_string()), false);
            a
        }
        None => {
            r.record("charge.axis", Value::from(ChargeAxis::X.to_string()), true);
            ChargeAxis::X
        }
    };
    Ok(())
}

fn resolve_closed(r: &mut Resolver, cfg: &mut ExperimentConfig) -> Result<()> {
    let param = r
        .sweep_param("sweep.param")?
        .ok_or_else(|| CliError::validation("sweep.param", "required in mode closed_sweep"))?;
    let curve_param = r.sweep_param("sweep.curve_param")?;
    let curve_values = r.parsed("sweep.curve_values", "a comma-separated list of reals", real_list)?;
    match (curve_param, &curve_values) {
        (Some(c), Some(_)) => require(c != param, "sweep.curve_param", "must differ from sweep.param")?,
        (Some(_), None) => return Err(CliError::validation("sweep.curve_values", "required with sweep.curve_param")),
        (None, Some(_)) => return Err(CliError::validation("sweep.curve_param", "required with sweep.curve_values")),
        (None, None) => {}
    }
    let curve_values = curve_values.unwrap_or_default();
    if let Some(c) = curve_param {
        r.record("sweep.curve_values", Value::from(curve_values.clone()), false);
        for &v in &curve_values {
            check_sweep_value(c, v, "sweep.curve_values")?;
        }
    }

    let swept: Vec<SweepParam> = std::iter::once(param).chain(curve_param).collect();
    resolve_physics(r, cfg, &swept)?;
    if swept.contains(&SweepParam::K) {
        if r.raw.contains_key("model.k") {
            return Err(CliError::validation("model.k", "is varied by the sweep and must not be set"));
        }
        r.used.insert("model.k".into());
    } else {
        cfg.model.k = r.real("model.k", Some(DEFAULT_K))?;
        check_sweep_value(SweepParam::K, cfg.model.k, "model.k")?;
    }

    let min = r.real("sweep.min", None)?;
    let max = r.real("sweep.max", None)?;
    let points = r.count("sweep.points", DEFAULT_GRID_POINTS)?;
    require(points >= 1, "sweep.points", "must be at least 1")?;
    require(max >= min, "sweep.max", "must not be below sweep.min")?;
    require(points > 1 || max == min, "sweep.points", "a single point needs sweep.min = sweep.max")?;
    let grid = linspace(min, max, points);
    check_sweep_value(param, min, "sweep.min")?;
    check_sweep_value(param, max, "sweep.max")?;
    let threshold = r.real("sweep.threshold", Some(DEFAULT_JUMP_THRESHOLD))?;
    require(threshold > 0.0, "sweep.threshold", "must be positive")?;
    cfg.time_points = r.count("integrate.time_points", DEFAULT_GRID_POINTS)?;
    require(cfg.time_points >= 2, "integrate.time_points", "must be at least 2")?;

    cfg.sweep = Some(SweepSpec {
        param,
        grid,
        curve_param,
        curve_values,
        threshold,
    });
    Ok(())
}

fn check_sweep_value(param: SweepParam, v: f64, key: &str) -> Result<()> {
    match param {
        SweepParam::T => require(v > 0.0, key, "temperatures must be positive"),
        SweepParam::K => require(v > 0.0 && v < PI, key, "momentum must lie strictly between 0 and pi"),
        _ => Ok(()),
    }
}

fn resolve_open(r: &mut Resolver, cfg: &mut ExperimentConfig) -> Result<()> {
    let in_range = |n: usize| (MIN_SITES..=MAX_SITES).contains(&n);
    if cfg.mode == Mode::OpenScaling {
        let (lo, hi) = r
            .parsed("model.N_range", "a size range such as `2..8`", size_range)?
            .ok_or_else(|| CliError::validation("model.N_range", "required in mode open_scaling"))?;
        require(
            in_range(lo) && in_range(hi),
            "model.N_range",
            &format!("sizes must lie within {MIN_SITES}..{MAX_SITES}"),
        )?;
        require(
            hi >= lo + 2,
            "model.N_range",
            "a power-law fit needs at least 3 sizes",
        )?;
        r.record("model.N_range", Value::from(format!("{lo}..{hi}")), false);
        cfg.sizes = (lo..=hi).collect();
        cfg.margin = r.real("fit.margin", Some(DEFAULT_MARGIN))?;
        require(cfg.margin > 0.0, "fit.margin", "must be positive")?;
    } else {
        let n = r
            .parsed("model.N", "a chain length", |s| s.parse::<usize>().ok())?
            .ok_or_else(|| CliError::validation("model.N", "required in mode open_run"))?;
        require(in_range(n), "model.N", &format!("must lie within {MIN_SITES}..{MAX_SITES}"))?;
        r.record("model.N", Value::from(n), false);
        cfg.sizes = vec![n];
    }
    resolve_physics(r, cfg, &[])?;
    cfg.g = r.real("noise.g", Some(DEFAULT_DEPHASING))?;
    require(cfg.g >= 0.0, "noise.g", "dephasing rate must be non-negative")?;

    let dt = r.real("integrate.dt", Some(DEFAULT_DT))?;
    let t_max = r.real("integrate.t_max", Some(DEFAULT_T_MAX))?;
    let record_stride = r.count("integrate.record_stride", DEFAULT_RECORD_STRIDE)?;
    let trace_tol = r.real("integrate.trace_tol", Some(DEFAULT_TRACE_TOL))?;
    let hermiticity_tol = r.real("integrate.hermiticity_tol", Some(DEFAULT_HERMITICITY_TOL))?;
    let steady = r.flag("integrate.steady_stop", true)?;
    let window = r.count("integrate.steady_window", DEFAULT_STEADY_WINDOW)?;
    let rel_tol = r.real("integrate.steady_rel_tol", Some(DEFAULT_STEADY_REL_TOL))?;
    require(window >= 2, "integrate.steady_window", "must be at least 2")?;
    require(rel_tol > 0.0, "integrate.steady_rel_tol", "must be positive")?;
    cfg.integrator = IntegratorConfig {
        dt,
        t_max,
        record_stride,
        trace_tol,
        hermiticity_tol,
        steady_stop: steady.then_some(SteadyStop { window, rel_tol }),
    };
    cfg.integrator
        .validate()
        .map_err(|e| CliError::validation("integrate.dt", e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG5A: &str = "mode = open_scaling\nmodel.B = 0.25\ncharge.omega = 0.25\nnoise.g = 0.2\nbath.T = 0.1\nmodel.N_range = 2..8\n";

    #[test]
    fn fig5a_example_is_valid() {
        let cfg = parse_config(FIG5A).unwrap();
        assert_eq!(cfg.mode, Mode::OpenScaling);
        assert_eq!(cfg.sizes, (2..=8).collect::<Vec<_>>());
        assert_eq!(cfg.model.b_field, 0.25);
        assert_eq!(cfg.omega, 0.25);
        assert_eq!(cfg.temperature, 0.1);
        assert_eq!(cfg.g, 0.2);
        assert_eq!(cfg.model.j_coupling, 0.0);
        assert!(cfg.params["model.J"].assumed);
        assert!(!cfg.params["model.B"].assumed);
        assert!(cfg.params["integrate.dt"].assumed);
        assert_eq!(cfg.integrator, IntegratorConfig::default());
    }

    #[test]
    fn empty_file_is_a_validation_error() {
        assert!(matches!(
            parse_config(""),
            Err(CliError::ConfigValidation { key, .. }) if key == "mode"
        ));
        assert!(matches!(
            parse_config("# only a comment\n"),
            Err(CliError::ConfigValidation { .. })
        ));
    }

    #[test]
    fn bad_number_is_a_syntax_error_with_line() {
        let text = "mode = open_scaling\nmodel.B = abc\n";
        assert!(matches!(parse_config(text), Err(CliError::ConfigSyntax { line: 2, .. })));
        assert!(matches!(parse_config("mode open_run"), Err(CliError::ConfigSyntax { line: 1, .. })));
        assert!(matches!(
            parse_config("mode = figure\nmode = figure"),
            Err(CliError::ConfigSyntax { line: 2, .. })
        ));
    }

    #[test]
    fn unknown_and_unused_keys_rejected() {
        let unknown = format!("{FIG5A}model.Bx = 1\n");
        assert!(matches!(
            parse_config(&unknown),
            Err(CliError::ConfigValidation { key, .. }) if key == "model.Bx"
        ));
        let unused = format!("{FIG5A}sweep.min = 1\n");
        assert!(matches!(
            parse_config(&unused),
            Err(CliError::ConfigValidation { key, .. }) if key == "sweep.min"
        ));
    }

    #[test]
    fn size_range_floor() {
        let two = FIG5A.replace("2..8", "2..3");
        assert!(matches!(
            parse_config(&two),
            Err(CliError::ConfigValidation { key, .. }) if key == "model.N_range"
        ));
        let three = FIG5A.replace("2..8", "2..4");
        assert_eq!(parse_config(&three).unwrap().sizes, vec![2, 3, 4]);
        assert!(parse_config(&FIG5A.replace("2..8", "2..9")).is_err());
        assert_eq!(parse_config(&FIG5A.replace("2..8", "3..=5")).unwrap().sizes, vec![3, 4, 5]);
    }

    #[test]
    fn closed_sweep_with_curves() {
        let text = "mode = closed_sweep\nbath.T = 0.01\ncharge.omega = 1\nsweep.param = J\nsweep.min = 0\n\
                    sweep.max = 8\nsweep.points = 5\nsweep.curve_param = B\nsweep.curve_values = 0, 0.5, 1\n";
        let cfg = parse_config(text).unwrap();
        let sweep = cfg.sweep.unwrap();
        assert_eq!(sweep.param, SweepParam::J);
        assert_eq!(sweep.grid, vec![0.0, 2.0, 4.0, 6.0, 8.0]);
        assert_eq!(sweep.curve_param, Some(SweepParam::B));
        assert_eq!(sweep.curve_values, vec![0.0, 0.5, 1.0]);
        assert_eq!(cfg.model.k, DEFAULT_K);
        assert!(cfg.params["model.k"].assumed);
        assert!(!cfg.params.contains_key("model.J"));

        let clash = format!("{text}model.J = 1\n");
        assert!(matches!(
            parse_config(&clash),
            Err(CliError::ConfigValidation { key, .. }) if key == "model.J"
        ));
    }

    #[test]
    fn temperature_sweep_needs_no_bath() {
        let text = "mode = closed_sweep\ncharge.omega = 1\nsweep.param = T\nsweep.min = 0.1\nsweep.max = 1\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.sweep.unwrap().grid.len(), DEFAULT_GRID_POINTS);
        let zero = text.replace("sweep.min = 0.1", "sweep.min = 0");
        assert!(parse_config(&zero).is_err());
    }

    #[test]
    fn single_point_sweep() {
        let text = "mode = closed_sweep\nbath.T = 0.1\ncharge.omega = 1\nsweep.param = B\nsweep.min = 0.5\n\
                    sweep.max = 0.5\nsweep.points = 1\n";
        assert_eq!(parse_config(text).unwrap().sweep.unwrap().grid, vec![0.5]);
    }

    #[test]
    fn reals_with_pi() {
        assert_eq!(parse_real("0.25"), Some(0.25));
        assert_eq!(parse_real("7pi/8"), Some(7.0 * PI / 8.0));
        assert_eq!(parse_real("7*pi/8"), Some(7.0 * PI / 8.0));
        assert_eq!(parse_real("-pi"), Some(-PI));
        assert_eq!(parse_real("π/4"), Some(PI / 4.0));
        assert_eq!(parse_real("pi/x"), None);
        assert_eq!(parse_real("inf"), None);
    }

    #[test]
    fn overrides_beat_file() {
        let text = format!("{FIG5A}integrate.dt = 0.01\n");
        let ov = Overrides {
            dt: Some(0.002),
            t_max: Some(5.0),
            out_dir: Some(PathBuf::from("out")),
        };
        let cfg = parse_config_with(&text, &ov).unwrap();
        assert_eq!(cfg.integrator.dt, 0.002);
        assert_eq!(cfg.integrator.t_max, 5.0);
        assert!(!cfg.params["integrate.t_max"].assumed);
        assert_eq!(cfg.out_dir, Some(PathBuf::from("out")));
    }

    #[test]
    fn figure_mode() {
        let cfg = parse_config("mode = figure\nfigure = 5\nintegrate.t_max = 10\n").unwrap();
        assert_eq!(cfg.figure, Some(5));
        assert_eq!(cfg.passthrough, vec![("integrate.t_max".to_string(), "10".to_string())]);
        assert!(matches!(parse_config("mode = figure\nfigure = 0"), Err(CliError::UnknownFigure(0))));
        assert!(matches!(parse_config("mode = figure\nbath.T = 1"), Err(CliError::ConfigValidation { .. })));
    }
}
