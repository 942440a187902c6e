//! Deterministic 8:1:1 splitting.

use crate::records::TrainingRecord;
use crate::DatasetError;
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<TrainingRecord>,
    pub valid: Vec<TrainingRecord>,
    pub test: Vec<TrainingRecord>,
    pub seed: u64,
}

/// Shuffle under `seed`, then take `⌊N/10⌋` records each for valid and
/// test; the remainder goes to train.
pub fn split_811(records: &[TrainingRecord], seed: u64) -> Result<DatasetSplit, DatasetError> {
    let n = records.len();
    if n < 10 {
        return Err(DatasetError::TooFew { n });
    }
    let mut shuffled = records.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);
    let tenth = n / 10;
    let test = shuffled.split_off(n - tenth);
    let valid = shuffled.split_off(n - 2 * tenth);
    Ok(DatasetSplit {
        train: shuffled,
        valid,
        test,
        seed,
    })
}
