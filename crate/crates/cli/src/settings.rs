//! Flag / config-file / default resolution and small argument parsers.
//!
//! The config file is a flat TOML key-value table; command-line flags win
//! over it, and built-in defaults fill the rest.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

/// Flat key-value settings loaded from `--config`.
#[derive(Debug, Default)]
pub struct FileConfig {
    map: BTreeMap<String, toml::Value>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(CliError::Io)?;
        let value: toml::Value = text
            .parse()
            .map_err(|e| CliError::Validation(format!("config file: {e}")))?;
        let toml::Value::Table(table) = value else {
            return Err(CliError::Validation(
                "config file must be a flat key-value table".into(),
            ));
        };
        let mut map = BTreeMap::new();
        for (k, v) in table {
            if v.is_table() || v.is_array() {
                return Err(CliError::Validation(format!(
                    "config key `{k}` must be a scalar (flat key-value document)"
                )));
            }
            map.insert(k, v);
        }
        Ok(Self { map })
    }

    pub fn str(&self, key: &str) -> Option<String> {
        self.map.get(key).map(|v| match v {
            toml::Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(toml::Value::Float(v)) => Ok(Some(*v)),
            Some(toml::Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(CliError::Validation(format!(
                "config key `{key}`: expected a number, got `{other}`"
            ))),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
            Some(other) => Err(CliError::Validation(format!(
                "config key `{key}`: expected a non-negative integer, got `{other}`"
            ))),
        }
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>, CliError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(toml::Value::Boolean(v)) => Ok(Some(*v)),
            Some(other) => Err(CliError::Validation(format!(
                "config key `{key}`: expected a boolean, got `{other}`"
            ))),
        }
    }
}

/// Parse a horizon list: comma-separated entries, each `N`, `A:B`
/// (inclusive) or `A:S:B` (stride S). The result must be strictly
/// increasing.
pub fn parse_taus(spec: &str) -> Result<Vec<usize>, CliError> {
    let mut taus = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let parts: Vec<&str> = token.split(':').collect();
        let parse = |s: &str| -> Result<usize, CliError> {
            s.parse()
                .map_err(|_| CliError::Validation(format!("bad tau value `{s}` in `{spec}`")))
        };
        match parts.as_slice() {
            [n] => taus.push(parse(n)?),
            [a, b] => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return Err(CliError::Validation(format!("empty tau range `{token}`")));
                }
                taus.extend(a..=b);
            }
            [a, s, b] => {
                let (a, s, b) = (parse(a)?, parse(s)?, parse(b)?);
                if s == 0 {
                    return Err(CliError::Validation("tau stride must be positive".into()));
                }
                taus.extend((a..=b).step_by(s));
            }
            _ => {
                return Err(CliError::Validation(format!(
                    "bad tau token `{token}` (use N, A:B or A:S:B)"
                )))
            }
        }
    }
    if taus.is_empty() {
        return Err(CliError::Validation("tau list is empty".into()));
    }
    if taus.iter().any(|&t| t == 0) {
        return Err(CliError::Validation("tau must be positive".into()));
    }
    if taus.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Validation(
            "tau list must be strictly increasing".into(),
        ));
    }
    Ok(taus)
}

pub fn parse_families(spec: &str) -> Result<Vec<svret::DistKind>, CliError> {
    let mut out = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let kind: svret::DistKind = token.parse().map_err(CliError::Validation)?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    if out.is_empty() {
        return Err(CliError::Validation("family list is empty".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_specs() {
        assert_eq!(parse_taus("1,5,10").unwrap(), vec![1, 5, 10]);
        assert_eq!(parse_taus("1:5").unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_taus("1:2:7").unwrap(), vec![1, 3, 5, 7]);
        assert_eq!(parse_taus("1:3,10").unwrap(), vec![1, 2, 3, 10]);
        assert!(parse_taus("").is_err());
        assert!(parse_taus("5,3").is_err());
        assert!(parse_taus("0:3").is_err());
        assert!(parse_taus("a").is_err());
    }

    #[test]
    fn family_lists() {
        let fams = parse_families("ga,iga-jp,normal").unwrap();
        assert_eq!(fams.len(), 3);
        assert!(parse_families("bogus").is_err());
    }
}
