// SPDX-License-Identifier: Apache-2.0

use orbitforge_core::OrbitError;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass | Verdict::Info => 0,
            Verdict::Fail => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Fast,
}

/// Verb-specific outcome before the common envelope is attached.
#[derive(Debug)]
pub struct Outcome {
    pub verdict: Verdict,
    pub evidence: Value,
    pub witness: Value,
    pub body: Value,
}

impl Outcome {
    pub fn new(verdict: Verdict, evidence: Value, witness: Value, body: Value) -> Self {
        Outcome {
            verdict,
            evidence,
            witness,
            body,
        }
    }

    /// A library error raised after the input was accepted.
    pub fn from_error(err: &OrbitError) -> Self {
        Outcome::new(
            Verdict::Fail,
            json!({ "error": err.to_string() }),
            Value::Null,
            Value::Null,
        )
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub verb: &'static str,
    pub verdict: Verdict,
    pub tool_version: &'static str,
    pub inputs_digest: String,
    pub mode: Mode,
    pub precision_bits: Option<u32>,
    pub evidence: Value,
    pub witness: Value,
    pub body: Value,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// Failures that stop a verb before it produces a verdict.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, or an invalid flag value (exit 2).
    Usage(String),
    Json { line: usize, column: usize, message: String },
}

impl CliError {
    pub fn to_json(&self, verb: &str) -> String {
        let error = match self {
            CliError::Usage(message) => json!({ "kind": "usage", "message": message }),
            CliError::Json { line, column, message } => {
                json!({ "kind": "malformed-json", "line": line, "column": column, "message": message })
            }
        };
        let mut text = serde_json::to_string_pretty(&json!({
            "verb": verb,
            "tool_version": TOOL_VERSION,
            "error": error,
        }))
        .expect("errors serialize");
        text.push('\n');
        text
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Json { line, column, message } => {
                write!(f, "malformed JSON at line {line}, column {column}: {message}")
            }
        }
    }
}

impl From<OrbitError> for CliError {
    fn from(e: OrbitError) -> Self {
        match e {
            OrbitError::Json { line, column, message } => CliError::Json { line, column, message },
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.line() == 0 {
            CliError::Usage(e.to_string())
        } else {
            CliError::Json {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }
        }
    }
}
