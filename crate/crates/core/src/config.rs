//! Minimal `[section]` / `key = value` configuration files shared by the
//! scenario and tracker parameter formats.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{section}.{key}`")]
    UnknownKey { section: String, key: String },
    #[error("unknown section `[{0}]`")]
    UnknownSection(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub value: String,
    pub line: usize,
}

/// Parsed file: section name to ordered key/value entries. Keys outside any
/// section land in the "" section.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut sections: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        let mut current = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split(['#', ';']).next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line,
                    message: format!("unterminated section header {content:?}"),
                })?;
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, got {content:?}"),
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    message: "empty key".into(),
                });
            }
            let entry = Entry {
                value: value.trim().to_string(),
                line,
            };
            if sections
                .entry(current.clone())
                .or_default()
                .insert(key.clone(), entry)
                .is_some()
            {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { sections })
    }

    pub fn sections(&self) -> impl Iterator<Item = (&str, &BTreeMap<String, Entry>)> {
        self.sections.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .map(|e| e.value.as_str())
    }
}

pub fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    if value.is_empty() {
        return Err(ConfigError::MissingKey(key.to_string()));
    }
    value.parse::<T>().map_err(|e| ConfigError::InvalidValue {
        key: key.to_string(),
        message: format!("{value:?}: {e}"),
    })
}

/// Accepts plain decimals and simple fractions such as `1/15`.
pub fn parse_real(key: &str, value: &str) -> Result<f64, ConfigError> {
    if let Some((num, den)) = value.split_once('/') {
        let n: f64 = parse_value(key, num.trim())?;
        let d: f64 = parse_value(key, den.trim())?;
        if d == 0.0 {
            return Err(ConfigError::InvalidValue {
                key: key.to_string(),
                message: "zero denominator".into(),
            });
        }
        return Ok(n / d);
    }
    parse_value(key, value)
}

pub fn parse_reals(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value.split(',').map(|v| parse_real(key, v.trim())).collect()
}
