//! Plain-text `key = value` configuration maps.
//!
//! Values are either scalars (`phi = 0.25`, `family = bg`) or bracketed lists
//! (`kappas = [-1/3, 0.5]`). `#` starts a comment. Reals may be written as
//! decimals or as exact ratios `p/q`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(String),
    List(Vec<String>),
}

impl Value {
    pub fn as_str(&self) -> std::result::Result<&str, String> {
        match self {
            Value::Scalar(s) => Ok(s),
            Value::List(_) => Err("expected a scalar, found a list".into()),
        }
    }

    pub fn as_real(&self) -> std::result::Result<f64, String> {
        parse_real(self.as_str()?)
    }
}

/// Parsed map; each entry remembers the 1-based line it came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, (usize, Value)>,
}

impl ConfigMap {
    pub fn get(&self, key: &str) -> Option<&(usize, Value)> {
        self.entries.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn insert(&mut self, key: &str, line: usize, value: Value) {
        self.entries.insert(key.to_string(), (line, value));
    }

    pub fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        for (key, (line, _)) in &self.entries {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("unknown key `{key}`"),
                });
            }
        }
        Ok(())
    }
}

pub fn parse(text: &str) -> Result<ConfigMap> {
    let mut map = ConfigMap::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Parse {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(Error::Parse {
                line,
                message: format!("invalid key `{key}`"),
            });
        }
        if map.entries.contains_key(key) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        let value = parse_value(value.trim()).map_err(|message| Error::Parse { line, message })?;
        map.insert(key, line, value);
    }
    Ok(map)
}

fn parse_value(text: &str) -> std::result::Result<Value, String> {
    if let Some(rest) = text.strip_prefix('[') {
        let inner = rest
            .strip_suffix(']')
            .ok_or_else(|| format!("unterminated list `{text}`"))?;
        let items: Vec<String> = inner
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        return Ok(Value::List(items));
    }
    let unquoted = text
        .strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(text);
    if unquoted.is_empty() {
        return Err("empty value".into());
    }
    Ok(Value::Scalar(unquoted.to_string()))
}

/// Parses a decimal (`0.25`, `-1e-3`) or an exact ratio (`-1/3`).
pub fn parse_real(text: &str) -> std::result::Result<f64, String> {
    let text = text.trim();
    let value = if let Some((num, den)) = text.split_once('/') {
        let num: f64 = num
            .trim()
            .parse()
            .map_err(|_| format!("invalid numerator in `{text}`"))?;
        let den: f64 = den
            .trim()
            .parse()
            .map_err(|_| format!("invalid denominator in `{text}`"))?;
        if den == 0.0 {
            return Err(format!("zero denominator in `{text}`"));
        }
        num / den
    } else {
        text.parse::<f64>().map_err(|_| format!("invalid number `{text}`"))?
    };
    if !value.is_finite() {
        return Err(format!("non-finite number `{text}`"));
    }
    Ok(value)
}
