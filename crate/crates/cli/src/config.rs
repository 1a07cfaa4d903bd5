use std::path::Path;

use anyhow::{Context, Result};
use richpoint::rational::{self, Rational};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

/// Defaults read from a JSON object keyed by long flag names.
#[derive(Default)]
pub struct Config(Map<String, Value>);

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        match serde_json::from_str(&s).with_context(|| format!("parsing {}", path.display()))? {
            Value::Object(m) => Ok(Config(m)),
            _ => anyhow::bail!("{}: config must be a JSON object", path.display()),
        }
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .with_context(|| format!("config key {key:?}")),
        }
    }

    /// The flag if given, else the config value.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn pick_or<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    pub fn require<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.pick(flag, key)?
            .with_context(|| format!("missing --{key} (flag or config key)"))
    }

    /// Rationals may be written as `"num/den"` strings or integers.
    pub fn rational(&self, flag: Option<String>, key: &str) -> Result<Option<Rational>> {
        let raw = match flag {
            Some(s) => Some(s),
            None => match self.0.get(key) {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) => Some(s.clone()),
                Some(Value::Number(n)) => Some(n.to_string()),
                Some(_) => anyhow::bail!("config key {key:?} must be a rational"),
            },
        };
        raw.map(|s| rational::parse(&s).with_context(|| format!("--{key}")))
            .transpose()
    }
}
