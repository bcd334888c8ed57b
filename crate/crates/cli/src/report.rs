use qikit::DiagnosticReport;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL_NAME: &str = "qikit";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output of `qikit diagnose`. Depends only on the input bytes and the
/// tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct ReportFile {
    pub tool: String,
    pub tool_version: String,
    /// `sha256:` followed by the hex digest of the input file.
    pub input_digest: String,
    pub report: DiagnosticReport,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl ReportFile {
    pub fn new(input: &[u8], report: DiagnosticReport) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            tool_version: TOOL_VERSION.into(),
            input_digest: digest(input),
            report,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}
