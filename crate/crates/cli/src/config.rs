//! Effective configuration: flags, then a `key=value` file, then defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;

use crate::error::CliError;

/// Keys left out of the echoed `config:` lines. The seed has its own header
/// line; the others do not change the results.
const UNECHOED: &[&str] = &["seed", "threads", "out", "deterministic"];

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    used: Vec<String>,
    effective: Vec<(String, String)>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Settings::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|m| CliError::Usage(format!("{}: {m}", path.display())))
    }

    /// Blank lines and `#` comments are skipped; keys may use `-` or `_`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut file = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
            let key = k.trim().replace('-', "_");
            if file.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(format!("line {}: duplicate key {key}", i + 1));
            }
        }
        Ok(Settings {
            file,
            ..Default::default()
        })
    }

    fn take_file(&mut self, key: &str) -> Option<String> {
        self.used.push(key.to_string());
        self.file.get(key).cloned()
    }

    fn record(&mut self, key: &str, value: String) {
        if !UNECHOED.contains(&key) {
            self.effective.push((key.to_string(), value));
        }
    }

    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let from_file = self.take_file(key);
        let value = match (flag, from_file) {
            (Some(v), _) => v,
            (None, Some(s)) => s
                .parse()
                .map_err(|e| CliError::Usage(format!("config key {key}: {e}")))?,
            (None, None) => default,
        };
        self.record(key, value.to_string());
        Ok(value)
    }

    pub fn get_enum<T: ValueEnum + Clone>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError> {
        let from_file = self.take_file(key);
        let value = match (flag, from_file) {
            (Some(v), _) => v,
            (None, Some(s)) => T::from_str(&s, true)
                .map_err(|e| CliError::Usage(format!("config key {key}: {e}")))?,
            (None, None) => default,
        };
        let name = value
            .to_possible_value()
            .map(|p| p.get_name().to_string())
            .unwrap_or_default();
        self.record(key, name);
        Ok(value)
    }

    pub fn get_flag(&mut self, key: &str, flag: bool) -> Result<bool, CliError> {
        self.get(key, flag.then_some(true), false)
    }

    /// Fails on file keys that no resolver asked for.
    pub fn finish(self) -> Result<Vec<(String, String)>, CliError> {
        if let Some(k) = self.file.keys().find(|k| !self.used.contains(k)) {
            return Err(CliError::Usage(format!("unknown config key {k}")));
        }
        Ok(self.effective)
    }
}

/// A guard value: `none` or a non-negative integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard(pub Option<u32>);

impl FromStr for Guard {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("none") {
            return Ok(Guard(None));
        }
        s.parse()
            .map(|g| Guard(Some(g)))
            .map_err(|_| format!("expected `none` or an integer, got {s}"))
    }
}

impl Display for Guard {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            None => f.write_str("none"),
            Some(g) => write!(f, "{g}"),
        }
    }
}
