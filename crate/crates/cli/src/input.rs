use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qframe::{Alphabet, Distribution, InputDigest};

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct JsonDistribution {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    probs: Vec<f64>,
}

/// A parsed distribution file and the digest of its bytes.
pub struct Loaded {
    pub dist: Distribution,
    pub digest: InputDigest,
}

pub fn load(role: &str, path: &Path, normalize: bool) -> CliResult<Loaded> {
    let bad = |msg: String| CliError::Parse(format!("--{role} {}: {msg}", path.display()));
    let bytes = fs::read(path).map_err(|e| bad(e.to_string()))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| bad(e.to_string()))?;

    let (labels, weights) = if is_json(path, text) {
        let raw: JsonDistribution = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        (raw.labels, raw.probs)
    } else {
        let (labels, weights) = parse_csv(text).map_err(bad)?;
        (Some(labels), weights)
    };
    let alphabet = match labels {
        Some(l) => {
            if l.len() != weights.len() {
                return Err(bad(format!(
                    "labels has {} entries but probs has {}",
                    l.len(),
                    weights.len()
                )));
            }
            Alphabet::new(l)
        }
        None => Alphabet::indexed(weights.len()),
    }
    .map_err(|e| bad(format!("labels: {e}")))?;
    let dist =
        Distribution::new(alphabet, &weights, normalize).map_err(|e| bad(format!("probs: {e}")))?;

    Ok(Loaded {
        dist,
        digest: InputDigest {
            role: role.to_string(),
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        },
    })
}

fn is_json(path: &Path, text: &str) -> bool {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => true,
        Some(e) if e.eq_ignore_ascii_case("csv") => false,
        _ => text.trim_start().starts_with('{'),
    }
}

/// Two columns `label,prob` under a required header.
fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<f64>), String> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    if headers.len() != 2 || &headers[0] != "label" || &headers[1] != "prob" {
        return Err(format!(
            "header must be `label,prob`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        ));
    }
    let mut labels = Vec::new();
    let mut probs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let line = i + 2;
        let p = record[1]
            .parse::<f64>()
            .map_err(|_| format!("line {line}: prob `{}` is not a number", &record[1]))?;
        labels.push(record[0].to_string());
        probs.push(p);
    }
    Ok((labels, probs))
}

/// JSON form of a distribution, as read back by [`load`].
pub fn distribution_json(d: &Distribution) -> String {
    let raw = JsonDistribution {
        labels: Some(d.alphabet().labels().to_vec()),
        probs: d.probs().to_vec(),
    };
    serde_json::to_string_pretty(&raw).expect("plain data serializes") + "\n"
}
