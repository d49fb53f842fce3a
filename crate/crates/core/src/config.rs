//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are the long
//! option names of the command-line tool (`z`, `epsilon`, `betas`, `out-dir`,
//! ...); a value given on the command line wins over the file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyValueConfig {
    entries: BTreeMap<String, String>,
}

impl KeyValueConfig {
    /// Parses `text`, rejecting keys outside `known`.
    pub fn parse(text: &str, known: &[&str]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                input: raw.to_string(),
                reason: format!("line {} is not of the form key = value", n + 1),
            })?;
            let key = key.trim().replace('_', "-");
            if !known.contains(&key.as_str()) {
                return Err(Error::InvalidArgument(format!("unknown configuration key `{key}` on line {}", n + 1)));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::InvalidArgument(format!("configuration key `{key}` given twice")));
            }
        }
        Ok(KeyValueConfig { entries })
    }

    pub fn load(path: &Path, known: &[&str]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read config file {}: {e}", path.display())))?;
        KeyValueConfig::parse(&text, known)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    /// Parsed value of `key`, if present.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| Error::Parse {
                    input: v.to_string(),
                    reason: format!("configuration key `{key}`: {e}"),
                })
            })
            .transpose()
    }

    /// Command-line value, else the file's value, else `default`.
    pub fn resolve<T: FromStr>(&self, cli: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match cli {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    /// Boolean switch: set on the command line or `true`/`yes`/`1` in the file.
    pub fn flag(&self, cli: bool, key: &str) -> Result<bool> {
        if cli {
            return Ok(true);
        }
        match self.raw(key).map(|v| v.to_ascii_lowercase()) {
            None => Ok(false),
            Some(v) if ["true", "yes", "1", "on"].contains(&v.as_str()) => Ok(true),
            Some(v) if ["false", "no", "0", "off"].contains(&v.as_str()) => Ok(false),
            Some(v) => Err(Error::Parse {
                input: v,
                reason: format!("configuration key `{key}` expects true or false"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEYS: &[&str] = &["z", "betas", "out-dir", "no-timestamp"];

    #[test]
    fn precedence() {
        let c = KeyValueConfig::parse("# comment\n\nz = 30\nbetas = 0,0.5\n", KEYS).unwrap();
        assert_eq!(c.resolve(Some(10usize), "z", 50).unwrap(), 10);
        assert_eq!(c.resolve(None, "z", 50usize).unwrap(), 30);
        let empty = KeyValueConfig::default();
        assert_eq!(empty.resolve(None, "z", 50usize).unwrap(), 50);
        assert_eq!(c.raw("betas"), Some("0,0.5"));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(KeyValueConfig::parse("z 30", KEYS).is_err());
        assert!(KeyValueConfig::parse("zz = 30", KEYS).unwrap_err().is_usage());
        assert!(KeyValueConfig::parse("z = 1\nz = 2", KEYS).is_err());
        let c = KeyValueConfig::parse("z = many", KEYS).unwrap();
        assert!(c.get::<usize>("z").is_err());
    }

    #[test]
    fn flags_and_underscores() {
        let c = KeyValueConfig::parse("no_timestamp = yes\nout_dir = /tmp/x", KEYS).unwrap();
        assert!(c.flag(false, "no-timestamp").unwrap());
        assert_eq!(c.raw("out-dir"), Some("/tmp/x"));
        let c = KeyValueConfig::parse("no-timestamp = maybe", KEYS).unwrap();
        assert!(c.flag(false, "no-timestamp").is_err());
        assert!(c.flag(true, "no-timestamp").unwrap());
    }
}
