use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use nnls_core::{Error, Result};

/// Flat `key = value` settings; later lines override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("config line {}: expected key=value", i + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::InvalidInput(format!("config line {}: empty key", i + 1)));
            }
            map.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Config { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    /// A command-line value wins over the config file.
    pub fn pick<T: FromStr>(&self, cli: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| Error::InvalidInput(format!("config key '{key}' = '{v}': {e}"))),
        }
    }

    pub fn need<T: FromStr>(&self, cli: Option<T>, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.pick(cli, key)?.ok_or_else(|| Error::InvalidInput(format!("missing required parameter '{key}'")))
    }

    pub fn or<T: FromStr>(&self, cli: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.pick(cli, key)?.unwrap_or(default))
    }

    /// Comma-separated list of reals.
    pub fn list(&self, cli: Option<String>, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(text) = cli.or_else(|| self.raw(key).map(str::to_string)) else {
            return Ok(None);
        };
        parse_list(&text).map(Some).map_err(|e| Error::InvalidInput(format!("'{key}': {e}")))
    }
}

pub fn parse_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| format!("bad number '{s}': {e}")))
        .collect()
}
