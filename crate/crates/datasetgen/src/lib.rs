//! Builders for the three staged training datasets: code infilling (CI),
//! vulnerability detection (VD) and tag-guided instruction (TI). All
//! builders are pure functions of (corpus, seed); rebuilding with the same
//! inputs is byte-identical.

pub mod infill;
pub mod jsonl;
pub mod records;
pub mod split;

pub use infill::{make_infill_examples, render_infill, split_five_segments, InfillExample, Mode};
pub use jsonl::{read_labels, read_records, write_records, LabelEntry};
pub use records::{
    build_ci_dataset, build_ti_dataset, build_vd_dataset, extract_instruction, Stage, Tag,
    TrainingRecord,
};
pub use split::{split_811, DatasetSplit};

use thiserror::Error;

pub const SENTINEL_PRE: &str = "<PRE>";
pub const SENTINEL_SUF: &str = "<SUF>";
pub const SENTINEL_MID: &str = "<MID>";
pub const TAG_OPEN: &str = "[Tag]";
pub const TAG_CLOSE: &str = "[/Tag]";
pub const TAG_SECURITY: &str = "[Tag]<security>[/Tag]";
pub const TAG_VULNERABLE: &str = "[Tag]<vulnerable>[/Tag]";
pub const VD_PROMPT: &str = "whether this smart contract Code is a correct solution:";
pub const TI_PROMPT: &str = "Please give the contract code";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("contract {id} too short to segment: {n} tokens (need >= 10)")]
    TooShort { id: String, n: usize },
    #[error("too few records to split: {n} (need >= 10)")]
    TooFew { n: usize },
    #[error("contract {id} has no leading comment to use as instruction")]
    MissingInstruction { id: String },
    #[error("contract {id} contains a reserved sentinel string")]
    SentinelInSource { id: String },
    #[error(transparent)]
    Frontend(#[from] solfront::FrontendError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad record line: {0}")]
    Format(#[from] serde_json::Error),
}

/// Stable seed derivation so each (source, index) pair owns its own rng
/// stream and builders stay order-independent.
pub fn derive_seed(seed: u64, label: &str, index: u64) -> u64 {
    // FNV-1a over the parts; stable across platforms.
    let mut h: u64 = 0xcbf29ce484222325;
    let mut mix = |bytes: &[u8]| {
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    mix(&seed.to_le_bytes());
    mix(label.as_bytes());
    mix(&index.to_le_bytes());
    h
}
