//! Flat config files.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! line    = blank | comment | entry
//! comment = "#" any*
//! entry   = key ws* "=" ws* value ws* [ "#" any* ]
//! key     = [a-z0-9_-]+          (`-` and `_` are interchangeable)
//! ```
//!
//! Keys have the names of the long flags (`clip`, `alpha`, `p`, `symbol`, ...).
//! Lists are comma separated. Duplicate keys are an error.

use crate::error::{invalid, LabError, Result};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

fn norm_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return invalid("config", format!("line {}: expected `key = value`, got `{raw}`", i + 1));
            };
            let key = norm_key(k);
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
                return invalid("config", format!("line {}: bad key `{}`", i + 1, k.trim()));
            }
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return invalid("config", format!("line {}: duplicate key `{key}`", i + 1));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&norm_key(key)).map(String::as_str)
    }

    fn bad(key: &str, v: &str) -> LabError {
        LabError::InvalidParameter {
            name: "config",
            reason: format!("cannot parse `{v}` for key `{key}`"),
        }
    }

    /// Flag value if given, else the config entry.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            Some(v) => v.parse::<T>().map(Some).map_err(|_| Self::bad(key, v)),
            None => Ok(None),
        }
    }

    pub fn pick_enum<T: clap::ValueEnum>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            Some(v) => T::from_str(v, true).map(Some).map_err(|_| Self::bad(key, v)),
            None => Ok(None),
        }
    }

    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &'static str) -> Result<T> {
        self.pick(flag, key)?.ok_or(LabError::InvalidParameter {
            name: key,
            reason: "required (flag or config entry)".into(),
        })
    }

    pub fn require_enum<T: clap::ValueEnum>(&self, flag: Option<T>, key: &'static str) -> Result<T> {
        self.pick_enum(flag, key)?.ok_or(LabError::InvalidParameter {
            name: key,
            reason: "required (flag or config entry)".into(),
        })
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| Self::bad(key, v)))
                .collect::<Result<Vec<_>>>()
                .map(Some),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        let c = Config::parse("# run\nalpha = 0.5\nsymbol=monomial:3 # j\n\np = 1.5, 2\nout-dir = x\n").unwrap();
        assert_eq!(c.get("alpha"), Some("0.5"));
        assert_eq!(c.get("out_dir"), Some("x"));
        assert_eq!(c.list("p").unwrap(), Some(vec![1.5, 2.0]));
        assert_eq!(c.pick(Some(1.0), "alpha").unwrap(), Some(1.0));
        assert_eq!(c.pick::<f64>(None, "alpha").unwrap(), Some(0.5));
        assert!(c.pick::<f64>(None, "symbol").is_err());
        assert!(Config::parse("alpha 0.5").is_err());
        assert!(Config::parse("a=1\na=2").is_err());
        assert!(Config::parse("Bad=1").is_err());
    }
}
