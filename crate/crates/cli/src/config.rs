use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Fidelity,
    Figure,
    Table,
    GateSim,
    Schur,
    Estimate,
    Plan,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Fidelity => "fidelity",
            CommandKind::Figure => "figure",
            CommandKind::Table => "table",
            CommandKind::GateSim => "gate-sim",
            CommandKind::Schur => "schur",
            CommandKind::Estimate => "estimate",
            CommandKind::Plan => "plan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything needed to reproduce one run. Embedded verbatim in its artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    #[serde(default)]
    pub seed: u64,
    /// Empty means standard output.
    #[serde(default)]
    pub output_path: String,
    #[serde(default)]
    pub format: Format,
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))
    }
}

/// Typed access to `RunConfig::parameters`.
///
/// Every lookup records the value actually used, defaults included, so the
/// artifact carries the resolved configuration; keys never looked up are
/// rejected as unknown.
pub struct Params {
    given: BTreeMap<String, Value>,
    resolved: BTreeMap<String, Value>,
}

impl Params {
    pub fn new(given: BTreeMap<String, Value>) -> Self {
        Params { given, resolved: BTreeMap::new() }
    }

    fn take(&mut self, key: &str, default: Option<Value>) -> Result<Value, CliError> {
        let value = match self.given.remove(key) {
            Some(v) => v,
            None => default.ok_or_else(|| CliError::config(key, "required parameter is missing"))?,
        };
        self.resolved.insert(key.to_string(), value.clone());
        Ok(value)
    }

    pub fn u64(&mut self, key: &str, default: Option<u64>) -> Result<u64, CliError> {
        let v = self.take(key, default.map(Value::from))?;
        v.as_u64().ok_or_else(|| CliError::config(key, format!("expected a non-negative integer, got {v}")))
    }

    pub fn f64(&mut self, key: &str, default: Option<f64>) -> Result<f64, CliError> {
        let v = self.take(key, default.map(Value::from))?;
        v.as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::config(key, format!("expected a finite number, got {v}")))
    }

    pub fn string(&mut self, key: &str, default: Option<&str>, allowed: &[&str]) -> Result<String, CliError> {
        let v = self.take(key, default.map(Value::from))?;
        match v.as_str() {
            Some(s) if allowed.contains(&s) => Ok(s.to_string()),
            _ => Err(CliError::config(key, format!("expected one of {}, got {v}", allowed.join(", ")))),
        }
    }

    /// A list of integers; a bare integer is a one-element list.
    pub fn u64_list(&mut self, key: &str, default: Option<&[u64]>) -> Result<Vec<u64>, CliError> {
        let v = self.take(key, default.map(|d| Value::from(d.to_vec())))?;
        let bad = || CliError::config(key, format!("expected a list of non-negative integers, got {v}"));
        let list = match &v {
            Value::Array(items) => items.iter().map(|x| x.as_u64().ok_or_else(bad)).collect::<Result<Vec<_>, _>>()?,
            other => vec![other.as_u64().ok_or_else(bad)?],
        };
        if list.is_empty() {
            return Err(CliError::config(key, "list must not be empty"));
        }
        Ok(list)
    }

    pub fn optional_u64(&mut self, key: &str) -> Result<Option<u64>, CliError> {
        if self.given.contains_key(key) {
            self.u64(key, None).map(Some)
        } else {
            Ok(None)
        }
    }

    /// Resolved parameters; fails on any key that no lookup consumed.
    pub fn finish(self) -> Result<BTreeMap<String, Value>, CliError> {
        if let Some(key) = self.given.keys().next() {
            return Err(CliError::config(key, "unknown parameter for this command"));
        }
        Ok(self.resolved)
    }
}
