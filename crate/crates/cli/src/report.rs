//! Run reports: one JSON document per invocation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Environment variable naming the default report directory.
pub const REPORT_DIR_ENV: &str = "TRANSVERSAL_REPORT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Success,
    Infeasible,
    Failure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Infeasible | Status::Failure => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl Outcome {
    pub fn success() -> Self {
        Self { status: Status::Success, reason: None, detail: None }
    }

    pub fn with(status: Status, reason: impl Into<String>, detail: Option<Value>) -> Self {
        Self { status, reason: Some(reason.into()), detail }
    }
}

/// A file the run read, with the digest of its parsed content.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Input {
    pub path: String,
    pub digest: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationStamp {
    pub verifier: String,
    pub accepted: bool,
    pub violations: Vec<String>,
    /// Digest of the checked output.
    pub output_digest: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs: BTreeMap<String, Input>,
    pub params: Value,
    pub outcome: Outcome,
    pub timings: Timings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationStamp>,
    pub result: Value,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            seed: None,
            inputs: BTreeMap::new(),
            params: Value::Null,
            outcome: Outcome::success(),
            timings: Timings::default(),
            verification: None,
            result: Value::Null,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.outcome.status.exit_code()
    }

    /// `<dir>/<command>-<first input digest>-<seed>.json`.
    pub fn default_path(&self, dir: &Path) -> PathBuf {
        let digest = self.inputs.values().next().map_or("none", |i| i.digest.trim_start_matches("sha256:"));
        let short = &digest[..digest.len().min(12)];
        let seed = self.seed.map_or_else(|| "noseed".to_string(), |s| s.to_string());
        dir.join(format!("{}-{short}-{seed}.json", self.command))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

/// `sha256:<hex>` of the compact JSON of `value`.
pub fn digest<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("plain data");
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}
