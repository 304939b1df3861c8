//! The JSON document every CLI subcommand emits.
//!
//! Reports carry no timings or host details, so the same inputs and seed
//! always serialize to the same bytes.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::linalg::Tolerances;

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    /// Subcommand that produced the report.
    pub kind: String,
    /// `sha256` over the subcommand name and the raw input bytes.
    pub inputs_digest: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub status: String,
    pub results: Value,
    pub violations: Vec<ViolationEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationEntry {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl ViolationEntry {
    pub fn new(kind: impl Into<String>, message: impl Into<String>) -> Self {
        ViolationEntry {
            kind: kind.into(),
            message: message.into(),
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn from_error(e: &Error) -> Self {
        let kind = match e {
            Error::Usage(_) => "usage",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Domain(_) => "domain",
            Error::InvalidSystem(_) => "invalid_system",
            Error::Numeric(_) => "numeric",
        };
        let entry = ViolationEntry::new(kind, e.to_string());
        match e {
            Error::InvalidSystem(r) => entry.with_witness(serde_json::to_value(r).unwrap_or(Value::Null)),
            _ => entry,
        }
    }
}

pub fn digest(kind: &str, inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    h.update(kind.as_bytes());
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
