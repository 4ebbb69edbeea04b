//! Line-oriented `key = value` sweep configuration.
//!
//! Bare numbers are SI (rad/s for every frequency). Suffixes `Hz`, `kHz`,
//! `MHz`, `GHz` mean cyclic frequency and are multiplied by 2pi; `mW`, `W`,
//! `mK`, `K`, `nm`, `rad` and `pi` scale as expected. Frequency-valued keys may
//! be written as multiples of `omega_m`, `kappa_w` or `kappa_o`, which resolve
//! against the base values of the same file regardless of line order.

use std::fmt;
use std::fmt::Write as _;

use crate::constants::TWO_PI;
use crate::detection::{ErrorModel, ScenarioParams};
use crate::params::PhysicalParams;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line number, when the problem belongs to one line.
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, key: &str, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        Self {
            line: None,
            key: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "`{key}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Swept variable vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    G,
    Theta,
    Omega,
    M,
    Eta,
    NB,
    PW,
    PO,
    KappaW,
    KappaO,
}

impl Variable {
    pub const ALL: [Variable; 10] = [
        Variable::G,
        Variable::Theta,
        Variable::Omega,
        Variable::M,
        Variable::Eta,
        Variable::NB,
        Variable::PW,
        Variable::PO,
        Variable::KappaW,
        Variable::KappaO,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::G => "G",
            Variable::Theta => "theta",
            Variable::Omega => "omega",
            Variable::M => "M",
            Variable::Eta => "eta",
            Variable::NB => "n_B",
            Variable::PW => "P_w",
            Variable::PO => "P_o",
            Variable::KappaW => "kappa_w",
            Variable::KappaO => "kappa_o",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }

    fn dimension(self) -> Dimension {
        match self {
            Variable::G | Variable::Omega | Variable::KappaW | Variable::KappaO => Dimension::Frequency,
            Variable::Theta => Dimension::Angle,
            Variable::M | Variable::Eta | Variable::NB => Dimension::Pure,
            Variable::PW | Variable::PO => Dimension::Power,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// One swept axis; `min` and `max` are in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub variable: Variable,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn grid(&self) -> Vec<f64> {
        grid(self.min, self.max, self.steps, self.scale)
    }
}

/// `steps` points from `min` to `max` inclusive; both endpoints are exact.
pub fn grid(min: f64, max: f64, steps: usize, scale: Scale) -> Vec<f64> {
    let last = steps.saturating_sub(1).max(1) as f64;
    (0..steps)
        .map(|i| {
            if i == 0 {
                return min;
            }
            if i + 1 == steps {
                return max;
            }
            let t = i as f64 / last;
            match scale {
                Scale::Linear => min + (max - min) * t,
                Scale::Log => 10f64.powf(min.log10() + (max.log10() - min.log10()) * t),
            }
        })
        .collect()
}

/// Observables a sweep can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    Stability,
    LogNegativity,
    OpticalGivenMicrowave,
    MicrowaveGivenOptical,
    Snr,
    ErrorProbability,
    CoherentSnr,
    CoherentErrorProbability,
}

impl Output {
    pub const ALL: [Output; 8] = [
        Output::Stability,
        Output::LogNegativity,
        Output::OpticalGivenMicrowave,
        Output::MicrowaveGivenOptical,
        Output::Snr,
        Output::ErrorProbability,
        Output::CoherentSnr,
        Output::CoherentErrorProbability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::Stability => "stability",
            Output::LogNegativity => "E_N",
            Output::OpticalGivenMicrowave => "n_o_given_w",
            Output::MicrowaveGivenOptical => "n_w_given_o",
            Output::Snr => "SNR",
            Output::ErrorProbability => "P",
            Output::CoherentSnr => "SNR_coh",
            Output::CoherentErrorProbability => "P_coh",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == s)
    }
}

/// A fully resolved sweep: a base point, up to two axes, and the observables.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub physics: PhysicalParams,
    pub scenario: ScenarioParams,
    /// Evaluation frequency, rad/s.
    pub omega: f64,
    pub error_model: ErrorModel,
    pub axes: Vec<Axis>,
    pub outputs: Vec<Output>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        let physics = PhysicalParams::default();
        Self {
            physics,
            scenario: ScenarioParams::default(),
            omega: physics.omega_m,
            error_model: ErrorModel::AsPrinted,
            axes: Vec::new(),
            outputs: Output::ALL.to_vec(),
        }
    }
}

impl SweepSpec {
    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Frequency,
    Angle,
    Power,
    Temperature,
    Length,
    Pure,
    Count,
}

/// Base values that symbolic references resolve against.
#[derive(Debug, Clone, Copy, Default)]
struct Symbols {
    omega_m: Option<f64>,
    kappa_w: Option<f64>,
    kappa_o: Option<f64>,
}

// Longest suffixes first so that `mW` is not read as `W`, `kHz` as `Hz`, ...
const SUFFIXES: [&str; 14] = [
    "omega_m", "kappa_w", "kappa_o", "GHz", "MHz", "kHz", "rad", "Hz", "mW", "mK", "nm", "pi", "W", "K",
];

fn parse_quantity(text: &str, dim: Dimension, symbols: &Symbols) -> Result<f64, String> {
    let suffix = SUFFIXES.iter().copied().find(|s| text.ends_with(s));
    let (number, suffix) = match suffix {
        Some(s) => (text[..text.len() - s.len()].trim_end_matches('*'), Some(s)),
        None => (text, None),
    };
    let coefficient = match number {
        "" | "+" if matches!(suffix, Some("omega_m" | "kappa_w" | "kappa_o" | "pi")) => 1.0,
        "-" if matches!(suffix, Some("omega_m" | "kappa_w" | "kappa_o" | "pi")) => -1.0,
        _ => number
            .parse::<f64>()
            .map_err(|_| format!("cannot parse `{text}` as a quantity"))?,
    };
    if !coefficient.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    let (factor, unit_dim) = match suffix {
        None => return check_bare(coefficient, dim, text),
        Some("Hz") => (TWO_PI, Dimension::Frequency),
        Some("kHz") => (TWO_PI * 1e3, Dimension::Frequency),
        Some("MHz") => (TWO_PI * 1e6, Dimension::Frequency),
        Some("GHz") => (TWO_PI * 1e9, Dimension::Frequency),
        Some("mW") => (1e-3, Dimension::Power),
        Some("W") => (1.0, Dimension::Power),
        Some("mK") => (1e-3, Dimension::Temperature),
        Some("K") => (1.0, Dimension::Temperature),
        Some("nm") => (1e-9, Dimension::Length),
        Some("rad") => (1.0, Dimension::Angle),
        Some("pi") => (std::f64::consts::PI, Dimension::Angle),
        Some(sym) => {
            let value = match sym {
                "omega_m" => symbols.omega_m,
                "kappa_w" => symbols.kappa_w,
                _ => symbols.kappa_o,
            };
            let value = value.ok_or_else(|| format!("`{sym}` cannot be referenced here"))?;
            (value, Dimension::Frequency)
        }
    };
    if unit_dim != dim {
        return Err(format!("unit in `{text}` does not fit this key"));
    }
    Ok(coefficient * factor)
}

fn check_bare(value: f64, dim: Dimension, text: &str) -> Result<f64, String> {
    if dim == Dimension::Count && (value.fract() != 0.0 || !(1.0..=9.007_199_254_740_992e15).contains(&value)) {
        return Err(format!("`{text}` is not a positive integer"));
    }
    Ok(value)
}

fn key_dimension(key: &str) -> Option<Dimension> {
    Some(match key {
        "omega_m" | "omega_w" | "kappa_w" | "kappa_o" | "delta_w" | "delta_o" | "g_w" | "g_o" | "G" | "omega" => {
            Dimension::Frequency
        }
        "lambda" => Dimension::Length,
        "Q" | "eta" | "n_B" => Dimension::Pure,
        "M" => Dimension::Count,
        "P_w" | "P_o" => Dimension::Power,
        "theta" => Dimension::Angle,
        "T" => Dimension::Temperature,
        _ => return None,
    })
}

const OTHER_KEYS: [&str; 4] = ["error_model", "outputs", "axis1", "axis2"];

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

pub fn parse_config(text: &str) -> Result<SweepSpec, ConfigError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError {
            line: Some(line),
            key: None,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key_dimension(key).is_none() && !OTHER_KEYS.contains(&key) {
            return Err(ConfigError::at(line, key, "unknown key"));
        }
        if value.is_empty() {
            return Err(ConfigError::at(line, key, "missing value"));
        }
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            return Err(ConfigError::at(line, key, format!("already set on line {}", prev.line)));
        }
        entries.push(Entry { line, key, value });
    }

    let find = |key: &str| entries.iter().find(|e| e.key == key);
    let quantity = |key: &str, symbols: &Symbols| -> Result<Option<f64>, ConfigError> {
        match find(key) {
            None => Ok(None),
            Some(e) => parse_quantity(e.value, key_dimension(key).unwrap(), symbols)
                .map(Some)
                .map_err(|m| ConfigError::at(e.line, key, m)),
        }
    };

    let defaults = PhysicalParams::default();
    let mut physics = defaults;
    let mut symbols = Symbols::default();
    physics.omega_m = quantity("omega_m", &symbols)?.unwrap_or(defaults.omega_m);
    symbols.omega_m = Some(physics.omega_m);
    // Unset widths follow omega_m so that ratio-based defaults keep their meaning.
    physics.kappa_w = quantity("kappa_w", &symbols)?.unwrap_or(0.24 * physics.omega_m);
    physics.kappa_o = quantity("kappa_o", &symbols)?.unwrap_or(0.2 * physics.omega_m);
    symbols.kappa_w = Some(physics.kappa_w);
    symbols.kappa_o = Some(physics.kappa_o);

    let get = |key: &str, default: f64| -> Result<f64, ConfigError> { Ok(quantity(key, &symbols)?.unwrap_or(default)) };
    physics.omega_w = get("omega_w", defaults.omega_w)?;
    physics.lambda_o = get("lambda", defaults.lambda_o)?;
    physics.q_m = get("Q", defaults.q_m)?;
    physics.delta_w = get("delta_w", -physics.omega_m)?;
    physics.delta_o = get("delta_o", physics.omega_m)?;
    physics.g_w = get("g_w", defaults.g_w)?;
    physics.g_o = get("g_o", defaults.g_o)?;
    physics.power_w = get("P_w", defaults.power_w)?;
    physics.power_o = get("P_o", defaults.power_o)?;
    physics.opa_gain = get("G", defaults.opa_gain)?;
    physics.opa_phase = get("theta", defaults.opa_phase)?;
    physics.temperature = get("T", defaults.temperature)?;
    let physics = physics
        .validated()
        .map_err(|e| ConfigError::global(e.to_string()))?;

    let scenario_defaults = ScenarioParams::default();
    let scenario = ScenarioParams {
        eta: get("eta", scenario_defaults.eta)?,
        mode_pairs: get("M", scenario_defaults.mode_pairs as f64)? as u64,
        n_background: get("n_B", scenario_defaults.n_background)?,
    }
    .validated()
    .map_err(|e| ConfigError::global(e.to_string()))?;
    let omega = get("omega", physics.omega_m)?;

    let error_model = match find("error_model") {
        None => ErrorModel::default(),
        Some(e) => e
            .value
            .parse()
            .map_err(|m: String| ConfigError::at(e.line, "error_model", m))?,
    };

    let outputs = match find("outputs") {
        None => Output::ALL.to_vec(),
        Some(e) => parse_outputs(e.value).map_err(|m| ConfigError::at(e.line, "outputs", m))?,
    };

    let mut axes = Vec::new();
    for key in ["axis1", "axis2"] {
        if let Some(e) = find(key) {
            if key == "axis2" && axes.is_empty() {
                return Err(ConfigError::at(e.line, key, "axis2 requires axis1"));
            }
            let axis = parse_axis(e.value, &symbols).map_err(|m| ConfigError::at(e.line, key, m))?;
            if axes.iter().any(|a: &Axis| a.variable == axis.variable) {
                return Err(ConfigError::at(e.line, key, "the same variable is swept twice"));
            }
            axes.push(axis);
        }
    }

    Ok(SweepSpec {
        physics,
        scenario,
        omega,
        error_model,
        axes,
        outputs,
    })
}

fn parse_outputs(value: &str) -> Result<Vec<Output>, String> {
    let mut outputs = Vec::new();
    for name in value.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
        let output = Output::from_name(name).ok_or_else(|| {
            let known: Vec<_> = Output::ALL.iter().map(|o| o.name()).collect();
            format!("unknown output `{name}` (expected one of {})", known.join(", "))
        })?;
        if outputs.contains(&output) {
            return Err(format!("output `{name}` listed twice"));
        }
        outputs.push(output);
    }
    if outputs.is_empty() {
        return Err("no outputs listed".into());
    }
    Ok(outputs)
}

fn parse_axis(value: &str, symbols: &Symbols) -> Result<Axis, String> {
    let fields: Vec<&str> = value.split_whitespace().collect();
    if !(4..=5).contains(&fields.len()) {
        return Err("expected `<variable> <min> <max> <steps> [linear|log]`".into());
    }
    let variable = Variable::from_name(fields[0]).ok_or_else(|| {
        let known: Vec<_> = Variable::ALL.iter().map(|v| v.name()).collect();
        format!("`{}` is not a sweepable variable (expected one of {})", fields[0], known.join(", "))
    })?;
    let dim = variable.dimension();
    let min = parse_quantity(fields[1], dim, symbols)?;
    let max = parse_quantity(fields[2], dim, symbols)?;
    let steps: usize = fields[3]
        .parse()
        .map_err(|_| format!("cannot parse `{}` as a step count", fields[3]))?;
    if steps < 2 {
        return Err("an axis needs at least 2 steps".into());
    }
    let scale = match fields.get(4).copied() {
        None | Some("linear") => Scale::Linear,
        Some("log") => Scale::Log,
        Some(other) => return Err(format!("unknown scale `{other}` (expected linear or log)")),
    };
    if scale == Scale::Log && !(min > 0.0 && max > 0.0) {
        return Err("a log axis needs positive bounds".into());
    }
    Ok(Axis {
        variable,
        min,
        max,
        steps,
        scale,
    })
}

/// Renders a spec in the config format; `parse_config(&serialize(s)) == s`.
pub fn serialize(spec: &SweepSpec) -> String {
    let p = &spec.physics;
    let s = &spec.scenario;
    let mut out = String::new();
    let mut line = |key: &str, value: String| {
        let _ = writeln!(out, "{key} = {value}");
    };
    line("omega_m", format!("{:?}", p.omega_m));
    line("omega_w", format!("{:?}", p.omega_w));
    line("lambda", format!("{:?}", p.lambda_o));
    line("Q", format!("{:?}", p.q_m));
    line("kappa_w", format!("{:?}", p.kappa_w));
    line("kappa_o", format!("{:?}", p.kappa_o));
    line("delta_w", format!("{:?}", p.delta_w));
    line("delta_o", format!("{:?}", p.delta_o));
    line("g_w", format!("{:?}", p.g_w));
    line("g_o", format!("{:?}", p.g_o));
    line("P_w", format!("{:?}", p.power_w));
    line("P_o", format!("{:?}", p.power_o));
    line("G", format!("{:?}", p.opa_gain));
    line("theta", format!("{:?}", p.opa_phase));
    line("T", format!("{:?}", p.temperature));
    line("omega", format!("{:?}", spec.omega));
    line("eta", format!("{:?}", s.eta));
    line("M", s.mode_pairs.to_string());
    line("n_B", format!("{:?}", s.n_background));
    line("error_model", spec.error_model.to_string());
    let names: Vec<_> = spec.outputs.iter().map(|o| o.name()).collect();
    line("outputs", names.join(", "));
    for (i, a) in spec.axes.iter().enumerate() {
        let scale = match a.scale {
            Scale::Linear => "linear",
            Scale::Log => "log",
        };
        line(
            &format!("axis{}", i + 1),
            format!("{} {:?} {:?} {} {scale}", a.variable.name(), a.min, a.max, a.steps),
        );
    }
    out
}
