use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Hex SHA-256 of the compact JSON serialization of `value`.
pub fn digest<T: Serialize>(value: &T) -> String {
    let text = serde_json::to_string(value).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Serialize)]
pub struct ReportRecord {
    pub experiment: String,
    pub config_digest: String,
    pub config: Value,
    pub metrics: Value,
    pub verdicts: Vec<VerdictRow>,
    /// Only present with `--timing`; omitted so reruns are byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
    pub runs: Vec<Value>,
}

#[derive(Debug, Serialize)]
pub struct VerdictRow {
    pub map: String,
    pub input: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_distance: Option<String>,
    pub failed_variants: usize,
}

impl ReportRecord {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
