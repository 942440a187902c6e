//! Security analysis for generated Solidity: compile checking (external
//! `solc` with an internal clean-parse fallback), pattern detectors for the
//! eight DASP vulnerability classes, an adapter for the external Slither
//! analyzer's JSON reports, corpus labeling, and the compile/vulnerability
//! rate summary metrics.

pub mod compile;
pub mod detectors;
pub mod fixtures;
pub mod labels;
pub mod metrics;
pub mod slither;

pub use compile::{compile_check, CompileResult, CompileTool};
pub use detectors::{detect, DetectOutcome};
pub use labels::{label_corpus, CorpusLabel};
pub use metrics::{security_metrics, SecuritySummary};
pub use slither::{parse_slither_report, slither_adapter, DetectorMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The eight DASP top-ten classes covered by the detectors, plus OTHER for
/// external-tool findings our mapping table does not know.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VulnClass {
    /// Reentrancy
    RE,
    /// Access control
    AC,
    /// Arithmetic over/underflow
    AR,
    /// Unchecked low-level call
    ULLC,
    /// Denial of service
    DoS,
    /// Bad randomness
    BR,
    /// Front running
    FR,
    /// Time manipulation
    TM,
    /// External detector with no mapping entry
    OTHER,
}

impl VulnClass {
    pub fn as_str(self) -> &'static str {
        match self {
            VulnClass::RE => "RE",
            VulnClass::AC => "AC",
            VulnClass::AR => "AR",
            VulnClass::ULLC => "ULLC",
            VulnClass::DoS => "DoS",
            VulnClass::BR => "BR",
            VulnClass::FR => "FR",
            VulnClass::TM => "TM",
            VulnClass::OTHER => "OTHER",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    High,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VulnFinding {
    pub class: VulnClass,
    /// Byte range into the comment-stripped source the detectors ran on.
    pub span: (usize, usize),
    /// Which rule fired, e.g. "re-call-before-state-update".
    pub detector: String,
    pub confidence: Confidence,
}

#[derive(Debug, Error)]
pub enum SecError {
    /// The external binary exists in config but could not be executed.
    /// Deliberately distinct from "it ran and the source failed to compile".
    #[error("failed to spawn {tool}: {message}")]
    ToolSpawn { tool: String, message: String },
    #[error("no samples to summarize")]
    EmptyResults,
    #[error("malformed analyzer report: {0}")]
    BadReport(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
