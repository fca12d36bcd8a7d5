use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` to 12 significant digits: positional between 1e-4 and 1e12,
/// scientific outside. Rounding happens once, in the scientific form, so
/// both branches agree on the digits.
pub fn format_number(x: f64) -> String {
    assert!(x.is_finite(), "non-finite value reached the output layer");
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let exponent: i32 = sci.split_once('e').expect("scientific format").1.parse().expect("integer exponent");
    if !(-4..12).contains(&exponent) {
        return sci;
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent).max(0) as usize;
    let rounded: f64 = sci.parse().expect("round trip");
    format!("{rounded:.decimals$}")
}

/// Same rounding applied to every float inside a JSON value.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("round trip");
            *value = Value::from(rounded);
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

pub enum Cell {
    Int(u128),
    Num(f64),
    Flag(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format_number(*v),
            Cell::Flag(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Result of one command before it is written out.
pub struct Artifact {
    pub summary: String,
    pub table: Table,
    pub json: Value,
}

/// The full text of an artifact in the configured format, with the resolved
/// configuration and library version embedded.
pub fn render(config: &RunConfig, artifact: &Artifact) -> String {
    let config_json = serde_json::to_string(config).expect("config serializes");
    match config.format {
        crate::config::Format::Csv => {
            let mut out = format!("# superrep {}\n# config {config_json}\n", superrep_core::VERSION);
            out.push_str(&artifact.table.header.join(","));
            out.push('\n');
            for row in &artifact.table.rows {
                let cells: Vec<String> = row.iter().map(Cell::render).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        crate::config::Format::Json => {
            let mut result = artifact.json.clone();
            round_json(&mut result);
            let doc = serde_json::json!({
                "version": superrep_core::VERSION,
                "config": config,
                "result": result,
            });
            let mut out = serde_json::to_string_pretty(&doc).expect("json serializes");
            out.push('\n');
            out
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("result serializes")
}

/// Temp file in the target directory, then rename over the destination.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir)?;
    file.write_all(contents.as_bytes())?;
    file.as_file().sync_all()?;
    file.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(0.9452196048723), "0.945219604872");
        assert_eq!(format_number(1.0), "1.00000000000");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(120.0), "120.000000000");
        assert_eq!(format_number(1e-7), "1.00000000000e-7");
        assert_eq!(format_number(-0.5), "-0.500000000000");
        // A carry into the next decade keeps 12 digits.
        assert_eq!(format_number(9.9999999999999), "10.0000000000");
    }

    #[test]
    fn json_floats_are_rounded() {
        let mut v = serde_json::json!({"a": [0.1234567890123456, 3], "b": {"c": 2.0}});
        round_json(&mut v);
        assert_eq!(v["a"][0].as_f64().unwrap(), 0.123456789012);
        assert_eq!(v["a"][1], 3);
    }
}
