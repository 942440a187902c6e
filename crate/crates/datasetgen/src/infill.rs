//! Fill-in-the-middle example construction. The token sequence is divided
//! into five equal segments; the mid span runs from a random point in the
//! second segment to a random point in the fourth, so prefix and suffix
//! always carry real context. Remainder tokens when the length is not a
//! multiple of five extend the fifth segment.

use crate::{DatasetError, SENTINEL_MID, SENTINEL_PRE, SENTINEL_SUF};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use solfront::{tokenize, ContractSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Psm,
    Spm,
}

#[derive(Debug, Clone)]
pub struct InfillExample {
    pub pre_tokens: Vec<String>,
    pub mid_tokens: Vec<String>,
    pub suf_tokens: Vec<String>,
    pub pre_text: String,
    pub mid_text: String,
    pub suf_text: String,
    pub mode: Mode,
    pub j: usize,
    pub k: usize,
    pub source_id: String,
}

/// Draw truncation points: with `s = n / 5`, `j` uniform in `[s, 2s)` and
/// `k` uniform in `[3s, 4s)`.
pub fn split_five_segments(
    n: usize,
    id: &str,
    rng: &mut ChaCha8Rng,
) -> Result<(usize, usize), DatasetError> {
    if n < 10 {
        return Err(DatasetError::TooShort {
            id: id.to_string(),
            n,
        });
    }
    let s = n / 5;
    let j = rng.gen_range(s..2 * s);
    let k = rng.gen_range(3 * s..4 * s);
    Ok((j, k))
}

/// Build one infill example from a contract source. Text parts are byte
/// slices at token boundaries, so `pre ++ mid ++ suf` reproduces the
/// source exactly, token-wise and byte-wise.
pub fn make_infill_example(
    source: &ContractSource,
    source_id: &str,
    rng: &mut ChaCha8Rng,
) -> Result<InfillExample, DatasetError> {
    for sentinel in [SENTINEL_PRE, SENTINEL_SUF, SENTINEL_MID] {
        if source.text.contains(sentinel) {
            return Err(DatasetError::SentinelInSource {
                id: source_id.to_string(),
            });
        }
    }
    let stream = tokenize(source)?;
    let n = stream.tokens.len();
    let (j, k) = split_five_segments(n, source_id, rng)?;
    let mode = if rng.gen_bool(0.5) { Mode::Psm } else { Mode::Spm };
    let cut_j = stream.tokens[j].span.0;
    let cut_k = stream.tokens[k].span.0;
    let lexemes = |range: std::ops::Range<usize>| {
        stream.tokens[range]
            .iter()
            .map(|t| t.lexeme.clone())
            .collect::<Vec<_>>()
    };
    Ok(InfillExample {
        pre_tokens: lexemes(0..j),
        mid_tokens: lexemes(j..k),
        suf_tokens: lexemes(k..n),
        pre_text: source.text[..cut_j].to_string(),
        mid_text: source.text[cut_j..cut_k].to_string(),
        suf_text: source.text[cut_k..].to_string(),
        mode,
        j,
        k,
        source_id: source_id.to_string(),
    })
}

/// The five examples per contract, each with its own derived rng stream.
pub fn make_infill_examples(
    source: &ContractSource,
    source_id: &str,
    seed: u64,
    count: usize,
) -> Result<Vec<InfillExample>, DatasetError> {
    (0..count)
        .map(|i| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(crate::derive_seed(seed, source_id, i as u64));
            make_infill_example(source, source_id, &mut rng)
        })
        .collect()
}

/// Render to (input, target) text with sentinel markers.
pub fn render_infill(example: &InfillExample) -> (String, String) {
    let input = match example.mode {
        Mode::Psm => format!(
            "{SENTINEL_PRE}{}{SENTINEL_SUF}{}{SENTINEL_MID}",
            example.pre_text, example.suf_text
        ),
        Mode::Spm => format!(
            "{SENTINEL_PRE}{SENTINEL_SUF}{}{SENTINEL_MID}{}",
            example.suf_text, example.pre_text
        ),
    };
    (input, example.mid_text.clone())
}
