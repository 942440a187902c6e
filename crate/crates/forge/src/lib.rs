//! Orchestration for the full workflow: ingest a Solidity corpus, build
//! the three staged datasets, train the adapter stages in sequence,
//! generate tag-conditioned samples, evaluate them, and emit the report.
//! Every command is a pure function of (config, input files, seed);
//! rerunning with unchanged inputs reproduces the same artifact bytes.

pub mod build;
pub mod config;
pub mod evaluate;
pub mod generate;
pub mod ingest;
pub mod manifest;
pub mod report;
pub mod tasks;
pub mod train;

pub use config::PipelineConfig;
pub use manifest::RunManifest;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ForgeError {
    /// Bad or unusable configuration, including referenced input paths
    /// that do not exist. Exit code 2.
    #[error("config: {0}")]
    Config(String),
    /// An upstream artifact this command needs has not been produced
    /// yet (build before train, train before generate). Exit code 3.
    #[error("missing artifact: {0}")]
    Missing(String),
    /// A configured external tool could not be run. Exit code 4.
    #[error("external tool: {0}")]
    Tool(String),
    /// Anything else. Exit code 1.
    #[error("{0}")]
    Other(String),
}

impl ForgeError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ForgeError::Config(_) => 2,
            ForgeError::Missing(_) => 3,
            ForgeError::Tool(_) => 4,
            ForgeError::Other(_) => 1,
        }
    }
}

impl From<std::io::Error> for ForgeError {
    fn from(e: std::io::Error) -> Self {
        ForgeError::Other(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for ForgeError {
    fn from(e: serde_json::Error) -> Self {
        ForgeError::Other(format!("json: {e}"))
    }
}

impl From<tinylm::LmError> for ForgeError {
    fn from(e: tinylm::LmError) -> Self {
        ForgeError::Other(format!("model: {e}"))
    }
}

impl From<datasetgen::DatasetError> for ForgeError {
    fn from(e: datasetgen::DatasetError) -> Self {
        ForgeError::Other(format!("dataset: {e}"))
    }
}

impl From<codemetrics::MetricError> for ForgeError {
    fn from(e: codemetrics::MetricError) -> Self {
        ForgeError::Other(format!("metrics: {e}"))
    }
}

impl From<secscan::SecError> for ForgeError {
    fn from(e: secscan::SecError) -> Self {
        match e {
            secscan::SecError::ToolSpawn { tool, message } => {
                ForgeError::Tool(format!("{tool}: {message}"))
            }
            other => ForgeError::Other(format!("security: {other}")),
        }
    }
}
