//! Code generation quality metrics: smoothed BLEU over lexer tokens and a
//! Solidity adaptation of the four-component CodeBLEU (n-gram, keyword
//! weighted n-gram, normalized-subtree syntax match, def-use dataflow
//! match), plus the average/best aggregation over k samples per task.

pub mod aggregate;
pub mod bleu;
pub mod codebleu;

pub use aggregate::{aggregate, Aggregates};
pub use bleu::{bleu, weighted_ngram_match};
pub use codebleu::{ast_match, codebleu, dataflow_match, SampleScores};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("reference is empty")]
    EmptyReference,
    #[error("no samples to aggregate")]
    EmptySamples,
    #[error("codebleu weights must be nonnegative and sum to 1, got {0:?}")]
    InvalidWeights([f64; 4]),
    #[error(transparent)]
    Frontend(#[from] solfront::FrontendError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricConfig {
    pub max_n: usize,
    /// (alpha, beta, gamma, delta) over the four CodeBLEU components.
    pub codebleu_weights: [f64; 4],
    pub keyword_weight: f64,
    pub smoothing_epsilon: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            max_n: 4,
            codebleu_weights: [0.25, 0.25, 0.25, 0.25],
            keyword_weight: 4.0,
            smoothing_epsilon: 1e-9,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), MetricError> {
        let sum: f64 = self.codebleu_weights.iter().sum();
        if self.codebleu_weights.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(MetricError::InvalidWeights(self.codebleu_weights));
        }
        Ok(())
    }
}
