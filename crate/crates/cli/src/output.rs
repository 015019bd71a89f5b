use std::fs;
use std::path::Path;

use qframe::{ExtendedReal, RunReport};

use crate::error::{CliError, CliResult};

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn number(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Terminal form: infinity prints as `+inf`.
pub fn value(v: ExtendedReal) -> String {
    match v {
        ExtendedReal::Finite(f) => number(f),
        ExtendedReal::PosInf => "+inf".to_string(),
    }
}

/// CSV form: infinity prints as `inf`.
pub fn csv_value(v: ExtendedReal) -> String {
    match v {
        ExtendedReal::Finite(f) => number(f),
        ExtendedReal::PosInf => "inf".to_string(),
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents)
        .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))
}

pub fn write_report(path: Option<&Path>, report: &RunReport) -> CliResult<()> {
    let Some(path) = path else { return Ok(()) };
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Output(format!("report: {e}")))?;
    write_file(path, &(json + "\n"))
}
