//! Flat `key = value` experiment configs.
//!
//! One pair per line, `#` starts a comment. Lists are comma separated,
//! `inf` is accepted wherever an exponent is expected. Keys are fixed per
//! experiment; anything else is rejected with its line number.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("{}field `{field}`: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Field {
        field: String,
        line: Option<usize>,
        message: String,
    },
}

impl ConfigError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Field {
            field: field.into(),
            line: None,
            message: message.into(),
        }
    }

    /// The offending field, when the error is about one.
    pub fn field_name(&self) -> Option<&str> {
        match self {
            ConfigError::Field { field, .. } => Some(field),
            ConfigError::Syntax { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    SolitonAtlas,
    Evolve,
    ScatterProbe,
    GaugeCheck,
    IneqProbe,
    Theorem1Scan,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::SolitonAtlas,
        Experiment::Evolve,
        Experiment::ScatterProbe,
        Experiment::GaugeCheck,
        Experiment::IneqProbe,
        Experiment::Theorem1Scan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SolitonAtlas => "soliton-atlas",
            Experiment::Evolve => "evolve",
            Experiment::ScatterProbe => "scatter-probe",
            Experiment::GaugeCheck => "gauge-check",
            Experiment::IneqProbe => "ineq-probe",
            Experiment::Theorem1Scan => "theorem1-scan",
        }
    }

    /// Keys accepted besides `experiment`.
    pub fn keys(self) -> &'static [Key] {
        use Key::*;
        match self {
            Experiment::SolitonAtlas => &[Omega, Sigma, CGrid, Seed, OutputPath],
            Experiment::Evolve => &[
                Equation, Sigma, Datum, Delta, Omega, C, Alpha, NPoints, BoxLength, Dt, TEnd,
                Stride, Seed, OutputPath,
            ],
            Experiment::ScatterProbe => &[
                Sigma, Datum, Delta, Omega, C, Alpha, NPoints, BoxLength, Dt, TEnd, Stride, S,
                SPrime, Seed, OutputPath,
            ],
            Experiment::GaugeCheck => &[
                Delta, NPoints, BoxLength, Dt, TEnd, Stride, Seed, OutputPath,
            ],
            Experiment::IneqProbe => &[
                Probe, Q, R, P, S, Horizon, Members, Pairs, TimeStep, NPoints, BoxLength, Seed,
                OutputPath,
            ],
            Experiment::Theorem1Scan => &[Sigma, Omega, Norm, Count, CGrid, Seed, OutputPath],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
                ConfigError::field(
                    "experiment",
                    format!("unknown experiment `{s}`; valid: {}", names.join(", ")),
                )
            })
    }
}

/// Every config key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Key {
    Omega,
    C,
    Alpha,
    CGrid,
    Sigma,
    S,
    SPrime,
    Delta,
    NPoints,
    BoxLength,
    Dt,
    TEnd,
    Stride,
    Seed,
    OutputPath,
    Norm,
    Count,
    Equation,
    Datum,
    Probe,
    Q,
    R,
    P,
    Horizon,
    Members,
    Pairs,
    TimeStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Real,
    /// real, `inf` allowed
    Exponent,
    Count,
    Seed,
    List,
    Text,
    Choice(&'static [&'static str]),
}

impl Key {
    pub const ALL: [Key; 27] = [
        Key::Omega,
        Key::C,
        Key::Alpha,
        Key::CGrid,
        Key::Sigma,
        Key::S,
        Key::SPrime,
        Key::Delta,
        Key::NPoints,
        Key::BoxLength,
        Key::Dt,
        Key::TEnd,
        Key::Stride,
        Key::Seed,
        Key::OutputPath,
        Key::Norm,
        Key::Count,
        Key::Equation,
        Key::Datum,
        Key::Probe,
        Key::Q,
        Key::R,
        Key::P,
        Key::Horizon,
        Key::Members,
        Key::Pairs,
        Key::TimeStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Key::Omega => "omega",
            Key::C => "c",
            Key::Alpha => "alpha",
            Key::CGrid => "c_grid",
            Key::Sigma => "sigma",
            Key::S => "s",
            Key::SPrime => "s_prime",
            Key::Delta => "delta",
            Key::NPoints => "n_points",
            Key::BoxLength => "box_length",
            Key::Dt => "dt",
            Key::TEnd => "t_end",
            Key::Stride => "stride",
            Key::Seed => "seed",
            Key::OutputPath => "output_path",
            Key::Norm => "norm",
            Key::Count => "count",
            Key::Equation => "equation",
            Key::Datum => "datum",
            Key::Probe => "probe",
            Key::Q => "q",
            Key::R => "r",
            Key::P => "p",
            Key::Horizon => "horizon",
            Key::Members => "members",
            Key::Pairs => "pairs",
            Key::TimeStep => "time_step",
        }
    }

    fn kind(self) -> Kind {
        match self {
            Key::CGrid => Kind::List,
            Key::NPoints | Key::Stride | Key::Count | Key::Members | Key::Pairs => Kind::Count,
            Key::Seed => Kind::Seed,
            Key::OutputPath => Kind::Text,
            Key::Q | Key::R | Key::P => Kind::Exponent,
            Key::Norm => Kind::Choice(&["l2", "h1", "pc", "critical"]),
            Key::Equation => Kind::Choice(&["gdnls", "dnls", "linear"]),
            Key::Datum => Kind::Choice(&["gaussian", "soliton"]),
            Key::Probe => Kind::Choice(&["all", "strichartz", "smoothing", "maximal", "leibniz"]),
            _ => Kind::Real,
        }
    }

    fn parse_value(self, raw: &str) -> Result<Value, String> {
        let real = |s: &str| -> Result<f64, String> {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| format!("`{s}` is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{s}` is not finite"))
            }
        };
        match self.kind() {
            Kind::Real => real(raw).map(Value::Real),
            Kind::Exponent => {
                if matches!(raw, "inf" | "infinity") {
                    Ok(Value::Real(f64::INFINITY))
                } else {
                    real(raw).map(Value::Real)
                }
            }
            Kind::Count => raw
                .parse::<usize>()
                .map(|v| Value::Int(v as u64))
                .map_err(|_| format!("`{raw}` is not a non-negative integer")),
            Kind::Seed => raw
                .parse::<u64>()
                .map(Value::Int)
                .map_err(|_| format!("`{raw}` is not a 64-bit unsigned integer")),
            Kind::List => {
                let items = raw.split(',').map(real).collect::<Result<Vec<_>, _>>()?;
                Ok(Value::List(items))
            }
            Kind::Text => {
                if raw.is_empty() {
                    Err("empty path".into())
                } else {
                    Ok(Value::Text(raw.to_string()))
                }
            }
            Kind::Choice(options) => {
                if options.contains(&raw) {
                    Ok(Value::Text(raw.to_string()))
                } else {
                    Err(format!("`{raw}` is not one of {}", options.join(", ")))
                }
            }
        }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Key {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Key::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown key `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(u64),
    List(Vec<f64>),
    Text(String),
}

fn format_real(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        // shortest representation that parses back to the same f64
        format!("{v:?}")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Real(v) => f.write_str(&format_real(*v)),
            Value::Int(v) => write!(f, "{v}"),
            Value::List(v) => {
                let items: Vec<String> = v.iter().map(|x| format_real(*x)).collect();
                f.write_str(&items.join(", "))
            }
            Value::Text(s) => f.write_str(s),
        }
    }
}

/// A parsed config: experiment plus the keys that were set.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    values: BTreeMap<Key, Value>,
    lines: BTreeMap<Key, usize>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            values: BTreeMap::new(),
            lines: BTreeMap::new(),
        }
    }

    /// Parse config text. `fallback` supplies the experiment when the text
    /// has no `experiment` line; when both are present they must agree.
    pub fn parse(text: &str, fallback: Option<Experiment>) -> Result<Self, ConfigError> {
        let mut experiment: Option<(Experiment, usize)> = None;
        let mut raw: Vec<(Key, String, usize)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: lineno,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if k == "experiment" {
                if experiment.is_some() {
                    return Err(ConfigError::Syntax {
                        line: lineno,
                        message: "duplicate key `experiment`".into(),
                    });
                }
                let e = v.parse::<Experiment>().map_err(|e| at_line(e, lineno))?;
                experiment = Some((e, lineno));
                continue;
            }
            let key = k.parse::<Key>().map_err(|message| ConfigError::Syntax {
                line: lineno,
                message,
            })?;
            if raw.iter().any(|(k2, _, _)| *k2 == key) {
                return Err(ConfigError::Syntax {
                    line: lineno,
                    message: format!("duplicate key `{key}`"),
                });
            }
            raw.push((key, v.to_string(), lineno));
        }
        let experiment = match (experiment, fallback) {
            (Some((e, _)), None) => e,
            (None, Some(f)) => f,
            (Some((e, line)), Some(f)) if e != f => {
                return Err(ConfigError::Field {
                    field: "experiment".into(),
                    line: Some(line),
                    message: format!("config is for `{e}` but `{f}` was requested"),
                })
            }
            (Some((e, _)), Some(_)) => e,
            (None, None) => return Err(ConfigError::field("experiment", "missing")),
        };
        let mut cfg = ExperimentConfig::new(experiment);
        for (key, v, line) in raw {
            cfg.set_raw(key, &v).map_err(|e| at_line(e, line))?;
            cfg.lines.insert(key, line);
        }
        Ok(cfg)
    }

    /// Set a key from its text form, checking that the experiment accepts it.
    pub fn set_raw(&mut self, key: Key, raw: &str) -> Result<(), ConfigError> {
        if !self.experiment.keys().contains(&key) {
            return Err(ConfigError::field(
                key.name(),
                format!("not a parameter of `{}`", self.experiment),
            ));
        }
        let value = key
            .parse_value(raw.trim())
            .map_err(|m| ConfigError::field(key.name(), m))?;
        self.values.insert(key, value);
        self.lines.remove(&key);
        Ok(())
    }

    /// `key=value` override, as given on the command line.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), ConfigError> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| ConfigError::field(pair, "expected key=value"))?;
        let key = k
            .trim()
            .parse::<Key>()
            .map_err(|m| ConfigError::field(k.trim(), m))?;
        self.set_raw(key, v)
    }

    pub fn get(&self, key: Key) -> Option<&Value> {
        self.values.get(&key)
    }

    pub fn is_set(&self, key: Key) -> bool {
        self.values.contains_key(&key)
    }

    /// Field error carrying the line the key came from.
    pub fn error(&self, key: Key, message: impl Into<String>) -> ConfigError {
        ConfigError::Field {
            field: key.name().into(),
            line: self.lines.get(&key).copied(),
            message: message.into(),
        }
    }

    pub fn real(&self, key: Key, default: f64) -> f64 {
        match self.values.get(&key) {
            Some(Value::Real(v)) => *v,
            _ => default,
        }
    }

    pub fn opt_real(&self, key: Key) -> Option<f64> {
        match self.values.get(&key) {
            Some(Value::Real(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn int(&self, key: Key, default: u64) -> u64 {
        match self.values.get(&key) {
            Some(Value::Int(v)) => *v,
            _ => default,
        }
    }

    pub fn text<'a>(&'a self, key: Key, default: &'a str) -> &'a str {
        match self.values.get(&key) {
            Some(Value::Text(v)) => v,
            _ => default,
        }
    }

    pub fn list(&self, key: Key) -> Option<&[f64]> {
        match self.values.get(&key) {
            Some(Value::List(v)) => Some(v),
            _ => None,
        }
    }

    /// Normalized text: `experiment` first, then the set keys in a fixed order.
    pub fn to_normalized(&self) -> String {
        let mut out = format!("experiment = {}\n", self.experiment);
        for (k, v) in &self.values {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    /// `(key, value)` pairs of the normalized form.
    pub fn entries(&self) -> impl Iterator<Item = (Key, &Value)> {
        self.values.iter().map(|(k, v)| (*k, v))
    }
}

fn at_line(e: ConfigError, line: usize) -> ConfigError {
    match e {
        ConfigError::Field { field, message, .. } => ConfigError::Field {
            field,
            line: Some(line),
            message,
        },
        other => other,
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_normalized())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_normalizes() {
        let text =
            "# scan\nexperiment = theorem1-scan\nsigma = 1   # cubic\nnorm = h1\ncount = 10\n\n";
        let cfg = ExperimentConfig::parse(text, None).unwrap();
        assert_eq!(cfg.experiment, Experiment::Theorem1Scan);
        assert_eq!(cfg.real(Key::Sigma, 0.0), 1.0);
        assert_eq!(cfg.int(Key::Count, 0), 10);
        assert_eq!(
            cfg.to_normalized(),
            "experiment = theorem1-scan\nsigma = 1.0\nnorm = h1\ncount = 10\n"
        );
        let again = ExperimentConfig::parse(&cfg.to_normalized(), None).unwrap();
        assert_eq!(again.to_normalized(), cfg.to_normalized());
    }

    #[test]
    fn errors_carry_line_and_field() {
        let e = ExperimentConfig::parse("experiment = evolve\ndt = fast\n", None).unwrap_err();
        assert_eq!(
            e,
            ConfigError::Field {
                field: "dt".into(),
                line: Some(2),
                message: "`fast` is not a number".into()
            }
        );
        let e = ExperimentConfig::parse("experiment = evolve\nwidth = 3\n", None).unwrap_err();
        assert!(matches!(e, ConfigError::Syntax { line: 2, .. }));
        let e = ExperimentConfig::parse("experiment = evolve\nnorm = h1\n", None).unwrap_err();
        assert_eq!(e.field_name(), Some("norm"));
        let e = ExperimentConfig::parse("experiment = nope\n", None).unwrap_err();
        assert!(e.to_string().contains("theorem1-scan"));
        assert!(ExperimentConfig::parse("sigma = 2\n", None).is_err());
        assert!(
            ExperimentConfig::parse("experiment = evolve\n", Some(Experiment::GaugeCheck)).is_err()
        );
        assert!(ExperimentConfig::parse("experiment = evolve\ndt = 1\ndt = 2\n", None).is_err());
    }

    #[test]
    fn lists_and_infinity() {
        let cfg =
            ExperimentConfig::parse("experiment = ineq-probe\nq = inf\nr = 2\n", None).unwrap();
        assert_eq!(cfg.opt_real(Key::Q), Some(f64::INFINITY));
        let cfg = ExperimentConfig::parse("c_grid = -1, 0.5,1e-3", Some(Experiment::SolitonAtlas))
            .unwrap();
        assert_eq!(cfg.list(Key::CGrid), Some(&[-1.0, 0.5, 1e-3][..]));
        assert!(cfg.to_normalized().contains("c_grid = -1.0, 0.5, 0.001"));
    }
}
