//! Flat `key=value` text files with dotted section keys.
//!
//! Blank lines and lines starting with `#` are ignored. Keys must be unique.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KvError {
    #[error("{origin}:{line}: expected `key=value`")]
    Syntax { origin: String, line: usize },
    #[error("{origin}:{line}: duplicate key `{key}`")]
    Duplicate { origin: String, line: usize, key: String },
    #[error("{origin}: missing key `{key}`")]
    Missing { origin: String, key: String },
    #[error("{origin}: key `{key}`: cannot parse `{value}`: {reason}")]
    Value {
        origin: String,
        key: String,
        value: String,
        reason: String,
    },
    #[error("{origin}: unknown key `{key}`")]
    Unknown { origin: String, key: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Default)]
pub struct KvFile {
    origin: String,
    entries: BTreeMap<String, String>,
}

impl KvFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, KvError> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| KvError::Syntax {
                origin: origin.to_string(),
                line: n + 1,
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(KvError::Syntax {
                    origin: origin.to_string(),
                    line: n + 1,
                });
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(KvError::Duplicate {
                    origin: origin.to_string(),
                    line: n + 1,
                    key: key.to_string(),
                });
            }
        }
        Ok(KvFile {
            origin: origin.to_string(),
            entries,
        })
    }

    pub fn read(path: &Path) -> Result<Self, KvError> {
        let text = std::fs::read_to_string(path).map_err(|source| KvError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, KvError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e: T::Err| KvError::Value {
                origin: self.origin.clone(),
                key: key.to_string(),
                value: v.clone(),
                reason: e.to_string(),
            }),
        }
    }

    pub fn get_or<T>(&self, key: &str, default: T) -> Result<T, KvError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T>(&self, key: &str) -> Result<T, KvError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key)?.ok_or_else(|| KvError::Missing {
            origin: self.origin.clone(),
            key: key.to_string(),
        })
    }

    /// True when any key lives under `prefix.`.
    pub fn has_section(&self, prefix: &str) -> bool {
        let dotted = format!("{prefix}.");
        self.entries.keys().any(|k| k.starts_with(&dotted))
    }

    /// Returns the keys under `prefix.` with the prefix stripped.
    pub fn section(&self, prefix: &str) -> KvFile {
        let dotted = format!("{prefix}.");
        KvFile {
            origin: format!("{} [{}]", self.origin, prefix),
            entries: self
                .entries
                .iter()
                .filter_map(|(k, v)| k.strip_prefix(&dotted).map(|s| (s.to_string(), v.clone())))
                .collect(),
        }
    }

    /// Fails on the first key that is neither in `known` nor under one of `sections`.
    pub fn reject_unknown(&self, known: &[&str], sections: &[&str]) -> Result<(), KvError> {
        for key in self.entries.keys() {
            let in_section = sections
                .iter()
                .any(|s| key.strip_prefix(s).is_some_and(|rest| rest.starts_with('.')));
            if !known.contains(&key.as_str()) && !in_section {
                return Err(KvError::Unknown {
                    origin: self.origin.clone(),
                    key: key.clone(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let kv = KvFile::parse("# c\nfleet.capacity_kg = 4000\n\nseed=7\n", "t").unwrap();
        assert_eq!(kv.require::<u64>("seed").unwrap(), 7);
        let fleet = kv.section("fleet");
        assert_eq!(fleet.require::<f64>("capacity_kg").unwrap(), 4000.0);
        assert!(kv.has_section("fleet"));
        assert!(!kv.has_section("seed"));
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        assert!(matches!(
            KvFile::parse("a=1\na=2", "t"),
            Err(KvError::Duplicate { line: 2, .. })
        ));
        assert!(matches!(
            KvFile::parse("novalue", "t"),
            Err(KvError::Syntax { line: 1, .. })
        ));
        let kv = KvFile::parse("a=x", "t").unwrap();
        assert!(matches!(kv.get::<f64>("a"), Err(KvError::Value { .. })));
        assert!(matches!(kv.require::<f64>("b"), Err(KvError::Missing { .. })));
    }

    #[test]
    fn unknown_keys() {
        let kv = KvFile::parse("a=1\nfleet.x=2\nfleetx=3", "t").unwrap();
        assert!(kv.reject_unknown(&["a", "fleetx"], &["fleet"]).is_ok());
        assert!(kv.reject_unknown(&["a"], &["fleet"]).is_err());
    }
}
