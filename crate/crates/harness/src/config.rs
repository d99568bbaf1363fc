//! Flat `key = value` experiment configs.
//!
//! ```text
//! # comment
//! experiment = "spectral-rate"
//! seeds = [1, 2, 3]
//! output_dir = "out/spectral"
//! smoothness = 4.0
//! ```
//!
//! Values are integers, floats, booleans, double-quoted strings, or bracketed lists of
//! those. Which parameter keys are accepted is decided by the experiment.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
    List(Vec<Value>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v:?}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Str(s) => write!(f, "\"{s}\""),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub params: BTreeMap<String, Value>,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Line of each parameter, for error messages.
    pub lines: BTreeMap<String, usize>,
}

fn parse_scalar(raw: &str, line: usize) -> Result<Value> {
    let err = |m: String| HarnessError::Config { line, message: m };
    if let Some(body) = raw.strip_prefix('"') {
        return body
            .strip_suffix('"')
            .filter(|s| !s.contains('"'))
            .map(|s| Value::Str(s.to_string()))
            .ok_or_else(|| err(format!("unterminated string `{raw}`")));
    }
    match raw {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    let cleaned = raw.replace('_', "");
    if let Ok(v) = cleaned.parse::<i64>() {
        return Ok(Value::Int(v));
    }
    match cleaned.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Value::Float(v)),
        _ => Err(err(format!("cannot parse value `{raw}`"))),
    }
}

fn parse_value(raw: &str, line: usize) -> Result<Value> {
    if let Some(body) = raw.strip_prefix('[') {
        let body = body.strip_suffix(']').ok_or_else(|| HarnessError::Config {
            line,
            message: "unterminated list".into(),
        })?;
        if body.trim().is_empty() {
            return Ok(Value::List(Vec::new()));
        }
        return body
            .split(',')
            .map(|item| parse_scalar(item.trim(), line))
            .collect::<Result<_>>()
            .map(Value::List);
    }
    parse_scalar(raw, line)
}

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut experiment = None;
        let mut seeds = None;
        let mut output_dir = None;
        let mut params = BTreeMap::new();
        let mut lines = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = strip_comment(raw_line).trim();
            if content.is_empty() {
                continue;
            }
            let (key, raw) = content
                .split_once('=')
                .ok_or_else(|| HarnessError::Config {
                    line,
                    message: "expected `key = value`".into(),
                })?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(HarnessError::Config {
                    line,
                    message: format!("bad key `{key}`"),
                });
            }
            if lines.insert(key.to_string(), line).is_some() {
                return Err(HarnessError::Config {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            let value = parse_value(raw.trim(), line)?;
            let wrong = |what: &str| HarnessError::Config {
                line,
                message: format!("`{key}` must be {what}"),
            };
            match key {
                "experiment" => match value {
                    Value::Str(s) => experiment = Some(s),
                    _ => return Err(wrong("a string")),
                },
                "output_dir" => match value {
                    Value::Str(s) => output_dir = Some(PathBuf::from(s)),
                    _ => return Err(wrong("a string")),
                },
                "seeds" => match value {
                    Value::List(items) => {
                        let parsed = items
                            .iter()
                            .map(|v| match v {
                                Value::Int(i) if *i >= 0 => Ok(*i as u64),
                                _ => Err(wrong("a list of nonnegative integers")),
                            })
                            .collect::<Result<Vec<_>>>()?;
                        seeds = Some(parsed);
                    }
                    Value::Int(i) if i >= 0 => seeds = Some(vec![i as u64]),
                    _ => return Err(wrong("a list of nonnegative integers")),
                },
                _ => {
                    params.insert(key.to_string(), value);
                }
            }
        }
        let experiment = experiment.ok_or(HarnessError::Config {
            line: 0,
            message: "missing `experiment`".into(),
        })?;
        Ok(ExperimentConfig {
            experiment,
            params,
            seeds: seeds.unwrap_or_else(|| vec![0]),
            output_dir: output_dir.unwrap_or_else(|| PathBuf::from("onet-out")),
            lines,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn new(experiment: &str) -> Self {
        ExperimentConfig {
            experiment: experiment.to_string(),
            params: BTreeMap::new(),
            seeds: vec![0],
            output_dir: PathBuf::from("onet-out"),
            lines: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_seeds(mut self, seeds: impl IntoIterator<Item = u64>) -> Self {
        self.seeds = seeds.into_iter().collect();
        self
    }

    /// Rejects keys not in `allowed`, reporting the line of the first offender.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(HarnessError::Config {
                    line: self.lines.get(key).copied().unwrap_or(0),
                    message: format!("unknown key `{key}` for experiment `{}`", self.experiment),
                });
            }
        }
        Ok(())
    }
}

/// Typed parameter lookups with defaults.
pub struct Params<'a> {
    cfg: &'a ExperimentConfig,
}

impl<'a> Params<'a> {
    pub fn new(cfg: &'a ExperimentConfig) -> Self {
        Params { cfg }
    }

    pub fn raw(&self, key: &str) -> Option<&'a Value> {
        self.cfg.params.get(key)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.cfg.params.get(key) {
            None => Ok(default),
            Some(Value::Float(v)) => Ok(*v),
            Some(Value::Int(v)) => Ok(*v as f64),
            Some(other) => Err(HarnessError::param(
                key,
                format!("expected a number, got {other}"),
            )),
        }
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.f64(key, default)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(HarnessError::param(key, "must be positive"))
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.cfg.params.get(key) {
            None => Ok(default),
            Some(Value::Int(v)) if *v >= 0 => Ok(*v as usize),
            Some(other) => Err(HarnessError::param(
                key,
                format!("expected a nonnegative integer, got {other}"),
            )),
        }
    }

    pub fn bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.cfg.params.get(key) {
            None => Ok(default),
            Some(Value::Bool(v)) => Ok(*v),
            Some(other) => Err(HarnessError::param(
                key,
                format!("expected a boolean, got {other}"),
            )),
        }
    }

    pub fn usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.cfg.params.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::List(items)) if !items.is_empty() => items
                .iter()
                .map(|v| match v {
                    Value::Int(i) if *i > 0 => Ok(*i as usize),
                    _ => Err(HarnessError::param(key, "expected positive integers")),
                })
                .collect(),
            Some(other) => Err(HarnessError::param(
                key,
                format!("expected a list, got {other}"),
            )),
        }
    }

    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.cfg.params.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::List(items)) if !items.is_empty() => items
                .iter()
                .map(|v| match v {
                    Value::Int(i) => Ok(*i as f64),
                    Value::Float(f) => Ok(*f),
                    _ => Err(HarnessError::param(key, "expected numbers")),
                })
                .collect(),
            Some(other) => Err(HarnessError::param(
                key,
                format!("expected a list, got {other}"),
            )),
        }
    }
}
