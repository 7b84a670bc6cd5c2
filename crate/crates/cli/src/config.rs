//! Flat `key = value` configuration with one `[experiment]` section per
//! experiment. Keys before any section apply to every experiment.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use ini::Ini;
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct Config {
    global: BTreeMap<String, String>,
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        Self::from_ini(ini)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn from_ini(ini: Ini) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        for (section, props) in ini.iter() {
            let map: BTreeMap<String, String> = props.iter().map(|(k, v)| (k.trim().to_string(), v.trim().to_string())).collect();
            match section {
                None => cfg.global.extend(map),
                Some(name) if crate::experiments::NAMES.contains(&name) => {
                    cfg.sections.entry(name.to_string()).or_default().extend(map);
                }
                Some(name) => return Err(CliError::Usage(format!("config: unknown experiment section [{name}]"))),
            }
        }
        Ok(cfg)
    }

    pub fn global(&self, key: &str) -> Option<&str> {
        self.global.get(key).map(String::as_str)
    }

    /// Parameters for `experiment`: global keys overlaid by its section.
    /// Keys from the section must all be consumed; global keys may be ignored.
    pub fn params(&self, experiment: &str) -> Params {
        let mut values = BTreeMap::new();
        for (k, v) in &self.global {
            if k != "seed" {
                values.insert(k.clone(), (v.clone(), false));
            }
        }
        if let Some(sec) = self.sections.get(experiment) {
            for (k, v) in sec {
                values.insert(k.clone(), (v.clone(), true));
            }
        }
        Params { values, used: BTreeSet::new(), echo: serde_json::Map::new() }
    }
}

/// Typed view of one experiment's parameters. Every lookup records the
/// effective value for the report.
#[derive(Debug, Clone)]
pub struct Params {
    /// value and whether it came from the experiment's own section
    values: BTreeMap<String, (String, bool)>,
    used: BTreeSet<String>,
    echo: serde_json::Map<String, Value>,
}

fn bad(key: &str, raw: &str, what: &str) -> CliError {
    CliError::Usage(format!("parameter {key} = {raw:?}: expected {what}"))
}

/// Accepts decimals and fractions such as `4/3`.
fn parse_f64(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => s.parse().ok(),
    }
    .filter(|x: &f64| x.is_finite())
}

fn split_list(s: &str) -> Vec<&str> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    inner.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

impl Params {
    pub fn empty() -> Self {
        Config::default().params("")
    }

    /// Command-line overrides beat every config layer.
    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), (value.to_string(), true));
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.values.get(key).map(|v| v.0.clone())
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        let v = match self.raw(key) {
            Some(r) => r.parse().map_err(|_| bad(key, &r, "a nonnegative integer"))?,
            None => default,
        };
        self.echo.insert(key.into(), json!(v));
        Ok(v)
    }

    pub fn u32(&mut self, key: &str, default: u32) -> Result<u32, CliError> {
        let v = self.usize(key, default as usize)?;
        u32::try_from(v).map_err(|_| bad(key, &v.to_string(), "a 32-bit integer"))
    }

    pub fn i64(&mut self, key: &str, default: i64) -> Result<i64, CliError> {
        let v = match self.raw(key) {
            Some(r) => r.parse().map_err(|_| bad(key, &r, "an integer"))?,
            None => default,
        };
        self.echo.insert(key.into(), json!(v));
        Ok(v)
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = match self.raw(key) {
            Some(r) => parse_f64(&r).ok_or_else(|| bad(key, &r, "a finite number"))?,
            None => default,
        };
        self.echo.insert(key.into(), json!(v));
        Ok(v)
    }

    pub fn f64s(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let v = match self.raw(key) {
            Some(r) => split_list(&r).into_iter().map(|t| parse_f64(t).ok_or_else(|| bad(key, &r, "a list of numbers"))).collect::<Result<_, _>>()?,
            None => default.to_vec(),
        };
        self.echo.insert(key.into(), json!(v));
        Ok(v)
    }

    pub fn usizes(&mut self, key: &str, default: &[usize]) -> Result<Vec<usize>, CliError> {
        let v = match self.raw(key) {
            Some(r) => split_list(&r).into_iter().map(|t| t.parse().map_err(|_| bad(key, &r, "a list of integers"))).collect::<Result<_, _>>()?,
            None => default.to_vec(),
        };
        self.echo.insert(key.into(), json!(v));
        Ok(v)
    }

    pub fn choice(&mut self, key: &str, options: &[&'static str], default: &'static str) -> Result<&'static str, CliError> {
        let v = match self.raw(key) {
            Some(r) => *options.iter().find(|o| **o == r).ok_or_else(|| bad(key, &r, &format!("one of {}", options.join(", "))))?,
            None => default,
        };
        self.echo.insert(key.into(), json!(v));
        Ok(v)
    }

    /// Grid size: a power of two, at least 8.
    pub fn grid(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        let n = self.usize(key, default)?;
        if n < 8 || !n.is_power_of_two() {
            return Err(bad(key, &n.to_string(), "a power of two >= 8"));
        }
        Ok(n)
    }

    /// Rejects section keys that the experiment never asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        let unknown: Vec<&str> = self.values.iter().filter(|(k, v)| v.1 && !self.used.contains(*k)).map(|(k, _)| k.as_str()).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!("unknown parameter(s): {}", unknown.join(", "))))
        }
    }

    pub fn echo(&self) -> &serde_json::Map<String, Value> {
        &self.echo
    }
}
