//! Machine-readable run reports shared by the library suites and the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::qcore::ExtendedReal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    /// Hex SHA-256 of the file bytes.
    pub sha256: String,
}

/// One computed quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub quantity: String,
    pub q: f64,
    pub value: ExtendedReal,
    #[serde(default)]
    pub residuals: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl ResultRecord {
    pub fn new(quantity: impl Into<String>, q: f64, value: ExtendedReal) -> Self {
        ResultRecord {
            quantity: quantity.into(),
            q,
            value,
            residuals: BTreeMap::new(),
            point: None,
            flags: Vec::new(),
        }
    }

    pub fn with_residual(mut self, name: impl Into<String>, value: f64) -> Self {
        self.residuals.insert(name.into(), value);
        self
    }
}

/// Concrete evidence attached to a check: a counterexample, an offending
/// entry, or the worst case seen.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offending_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offending_value: Option<f64>,
}

/// Result of one named verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub check: String,
    pub passed: bool,
    /// Worst observed residual.
    pub residual: f64,
    pub threshold: f64,
    pub cases: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub q_values: Vec<f64>,
    pub results: Vec<ResultRecord>,
    pub suite_outcomes: Vec<SuiteOutcome>,
    pub tool_version: String,
    pub seed: u64,
}

impl RunReport {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        RunReport {
            command: command.into(),
            inputs: Vec::new(),
            q_values: Vec::new(),
            results: Vec::new(),
            suite_outcomes: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.suite_outcomes.iter().all(|o| o.passed)
    }
}
