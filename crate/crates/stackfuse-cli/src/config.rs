//! Flat `key=value` config files for the enhance subcommand.
//!
//! One setting per line; `#` starts a comment; whitespace around keys
//! and values is ignored. Command-line flags override file values.

use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

/// Keys the enhance subcommand understands.
pub const KNOWN_KEYS: &[&str] = &[
    "input",
    "output",
    "approach",
    "ev",
    "evs",
    "sigma_spatial",
    "sigma_range",
    "window_radius",
    "epsilon",
    "fusion",
    "emit_intermediates",
];

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", lineno + 1))?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key '{key}'", lineno + 1));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| format!("config key '{key}': {e}")),
        }
    }
}

/// Comma-separated EV list, e.g. `-1,0,+1`.
pub fn parse_ev_list(raw: &str) -> Result<Vec<f64>, String> {
    let evs: Result<Vec<f64>, _> = raw
        .split(',')
        .map(|tok| tok.trim().parse::<f64>())
        .collect();
    let evs = evs.map_err(|e| format!("bad EV list '{raw}': {e}"))?;
    if evs.is_empty() {
        return Err("EV list is empty".to_string());
    }
    Ok(evs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_values_and_comments() {
        let cfg = FileConfig::parse(
            "approach = b\n# full line comment\nevs = -1,0,1  # trailing\n\nepsilon=1e-6\n",
        )
        .unwrap();
        assert_eq!(cfg.get("approach"), Some("b"));
        assert_eq!(cfg.get("evs"), Some("-1,0,1"));
        assert_eq!(cfg.get_parsed::<f64>("epsilon").unwrap(), Some(1e-6));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(FileConfig::parse("nonsense = 1\n").is_err());
        assert!(FileConfig::parse("just a line\n").is_err());
    }

    #[test]
    fn ev_lists_parse_signed_values() {
        assert_eq!(parse_ev_list("-1,0,+1").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(parse_ev_list("-1.3, 0, 1.3").unwrap(), vec![-1.3, 0.0, 1.3]);
        assert!(parse_ev_list("a,b").is_err());
    }
}
