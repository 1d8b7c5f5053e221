//! JSON check reports and CSV tables.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One entry of the JSON report. `margin` is the signed slack of the check:
/// nonnegative exactly when it passes.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckBlock {
    pub name: String,
    pub inputs: Value,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl CheckBlock {
    fn build(name: impl Into<String>, inputs: Value, lhs: f64, rhs: f64, margin: f64, tol: f64) -> Self {
        CheckBlock {
            name: name.into(),
            inputs,
            lhs: finite(lhs),
            rhs: finite(rhs),
            margin: finite(margin),
            tolerance: Some(tol),
            pass: margin >= 0.0,
        }
    }

    /// `|lhs - rhs| <= tol |rhs|`.
    pub fn close(name: impl Into<String>, inputs: Value, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = tol - (lhs - rhs).abs() / rhs.abs();
        Self::build(name, inputs, lhs, rhs, margin, tol)
    }

    /// `|lhs - rhs| <= tol`.
    pub fn close_abs(name: impl Into<String>, inputs: Value, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = tol - (lhs - rhs).abs();
        Self::build(name, inputs, lhs, rhs, margin, tol)
    }

    /// `lhs >= (1 - tol) rhs`.
    pub fn at_least(name: impl Into<String>, inputs: Value, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = (lhs - rhs) / rhs.abs() + tol;
        Self::build(name, inputs, lhs, rhs, margin, tol)
    }

    /// `lhs <= tol`, for quantities that are already relative errors.
    pub fn at_most(name: impl Into<String>, inputs: Value, lhs: f64, tol: f64) -> Self {
        Self::build(name, inputs, lhs, 0.0, tol - lhs, tol)
    }

    /// Strict `lhs > rhs`.
    pub fn exceeds(name: impl Into<String>, inputs: Value, lhs: f64, rhs: f64) -> Self {
        let mut b = Self::build(name, inputs, lhs, rhs, lhs - rhs, 0.0);
        b.pass = lhs > rhs;
        b
    }

    /// Boolean condition with optional values.
    pub fn flag(name: impl Into<String>, inputs: Value, lhs: Option<f64>, rhs: Option<f64>, ok: bool) -> Self {
        CheckBlock { name: name.into(), inputs, lhs, rhs, margin: None, tolerance: None, pass: ok }
    }

    /// Reported value without a pass criterion.
    pub fn info(name: impl Into<String>, inputs: Value, lhs: f64, rhs: Option<f64>) -> Self {
        Self::flag(name, inputs, finite(lhs), rhs.and_then(finite), true)
    }
}

/// The run block heading every report: configuration, seed and version.
pub fn run_block(config: &RunConfig, text: &str) -> CheckBlock {
    let mut cfg = Map::new();
    for (k, v) in &config.entries {
        // the output directory does not affect results
        if k != "output" {
            cfg.insert(k.clone(), Value::String(v.clone()));
        }
    }
    CheckBlock::flag(
        "run",
        json!({
            "version": VERSION,
            "command": config.command.name(),
            "seed": config.seed,
            "config": cfg,
            "config_text": text,
        }),
        None,
        None,
        true,
    )
}

pub fn json_bytes(blocks: &[CheckBlock]) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_string_pretty(blocks)?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Serializable rows as CSV with a header row.
pub fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_are_nonnegative_exactly_on_pass() {
        let c = CheckBlock::close("c", json!({}), 2.01, 2.0, 0.01);
        assert!(c.pass && c.margin.unwrap() >= 0.0);
        let c = CheckBlock::close("c", json!({}), 2.05, 2.0, 0.01);
        assert!(!c.pass && c.margin.unwrap() < 0.0);
        let a = CheckBlock::at_least("a", json!({}), 0.985, 1.0, 0.02);
        assert!(a.pass);
        let a = CheckBlock::at_least("a", json!({}), 0.97, 1.0, 0.02);
        assert!(!a.pass);
        assert!(CheckBlock::at_most("m", json!({}), 0.009, 0.01).pass);
        assert!(!CheckBlock::exceeds("e", json!({}), 1.0, 1.0).pass);
    }

    #[test]
    fn nan_values_serialize_as_null() {
        let c = CheckBlock::close("c", json!({}), f64::NAN, 2.0, 0.01);
        assert!(!c.pass);
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"lhs\":null"));
    }
}
