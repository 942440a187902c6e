//! A desk-scale decoder-only language model with low-rank adapters. It is
//! trained in three chained stages — code infilling, vulnerability
//! detection, tag-guided instruction — and sampled with temperature +
//! nucleus truncation. Small enough that full runs finish on a CPU in
//! seconds; the mechanisms, not the capacity, are the point.

pub mod checkpoint;
pub mod model;
pub mod sample;
pub mod tokenizer;
pub mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use model::{
    AdapterPair, AdapterWeights, EncodedExample, Grads, LayerAdapters, MaskedLoss, TinyLm,
    TinyLmConfig,
};
pub use sample::{generate_secure, sample, SamplerConfig};
pub use tokenizer::{BpeTokenizer, EOT, EOT_STR, SPECIALS};
pub use train::{train_stage, EpochLog, Optimizer, TrainConfig};

use datasetgen::Stage;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LmError {
    #[error("bad model config: {0}")]
    BadConfig(String),
    #[error("sequence of {len} tokens exceeds context {context}")]
    SequenceTooLong { len: usize, context: usize },
    #[error("target of {len} tokens cannot fit context {context}")]
    TargetTruncated { len: usize, context: usize },
    #[error("adapter rank {rank} exceeds cap {max}")]
    RankTooLarge { rank: usize, max: usize },
    #[error("training stage {expected:?} but record {record_id} is {found:?}")]
    StageMismatch {
        expected: Stage,
        found: Stage,
        record_id: String,
    },
    #[error("non-finite loss on record {record_id}")]
    NonFiniteLoss { record_id: String },
    #[error("adapters have not been trained through the instruction stage")]
    NotTrained,
    #[error("bad sampler config: {0}")]
    BadSampler(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}
