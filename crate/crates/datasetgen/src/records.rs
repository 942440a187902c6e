//! Training record construction for the three stages, with the exact
//! prompt and tag strings the trainer conditions on.

use crate::infill::{make_infill_examples, render_infill};
use crate::{DatasetError, TAG_CLOSE, TAG_OPEN, TAG_SECURITY, TAG_VULNERABLE, TI_PROMPT, VD_PROMPT};
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use solfront::{strip_comments, tokenize, ContractSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    #[serde(rename = "CI")]
    Ci,
    #[serde(rename = "VD")]
    Vd,
    #[serde(rename = "TI")]
    Ti,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ci => "CI",
            Stage::Vd => "VD",
            Stage::Ti => "TI",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Security,
    Vulnerable,
    None,
}

impl Tag {
    pub fn target_string(self) -> Option<&'static str> {
        match self {
            Tag::Security => Some(TAG_SECURITY),
            Tag::Vulnerable => Some(TAG_VULNERABLE),
            Tag::None => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Tag::Security => "security",
            Tag::Vulnerable => "vulnerable",
            Tag::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingRecord {
    pub stage: Stage,
    pub input_text: String,
    pub target_text: String,
    pub tag: Tag,
    pub source_id: String,
}

/// Code infilling records: five fresh draws per contract, PSM/SPM chosen
/// with probability 0.5, output uniformly shuffled under `seed`. Returns
/// the records plus the ids of contracts skipped as too short.
pub fn build_ci_dataset(
    corpus: &[(String, ContractSource)],
    seed: u64,
) -> Result<(Vec<TrainingRecord>, Vec<String>), DatasetError> {
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (id, source) in corpus {
        let stripped = strip_comments(source)?;
        match make_infill_examples(&stripped, id, seed, 5) {
            Ok(examples) => {
                for example in &examples {
                    let (input_text, target_text) = render_infill(example);
                    records.push(TrainingRecord {
                        stage: Stage::Ci,
                        input_text,
                        target_text,
                        tag: Tag::None,
                        source_id: id.clone(),
                    });
                }
            }
            Err(DatasetError::TooShort { .. }) => skipped.push(id.clone()),
            Err(err) => return Err(err),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    records.shuffle(&mut rng);
    Ok((records, skipped))
}

/// Vulnerability detection records: comment-stripped code followed by the
/// detection prompt, targeting the matching tag block.
pub fn build_vd_dataset(
    corpus: &[(String, ContractSource, Tag)],
) -> Result<Vec<TrainingRecord>, DatasetError> {
    corpus
        .iter()
        .map(|(id, source, tag)| {
            let stripped = strip_comments(source)?;
            let target = tag
                .target_string()
                .expect("VD corpus entries must be labeled");
            Ok(TrainingRecord {
                stage: Stage::Vd,
                input_text: format!("{}\n{VD_PROMPT}", stripped.text),
                target_text: target.to_string(),
                tag: *tag,
                source_id: id.clone(),
            })
        })
        .collect()
}

/// Tag-guided instruction records: instruction, generation prompt and tag
/// block as input, the code as target.
pub fn build_ti_dataset(
    corpus: &[(String, String, String, Tag)],
) -> Result<Vec<TrainingRecord>, DatasetError> {
    corpus
        .iter()
        .map(|(id, instruction, code, tag)| {
            if instruction.trim().is_empty() {
                return Err(DatasetError::MissingInstruction { id: id.clone() });
            }
            let label = tag.label();
            Ok(TrainingRecord {
                stage: Stage::Ti,
                input_text: format!(
                    "{instruction}\n{TI_PROMPT}\n{TAG_OPEN}<{label}>{TAG_CLOSE}"
                ),
                target_text: code.clone(),
                tag: *tag,
                source_id: id.clone(),
            })
        })
        .collect()
}

/// The contiguous leading comment block of a contract, cleaned of comment
/// markers, for use as the TI instruction. `None` when the contract does
/// not open with a comment.
pub fn extract_instruction(source: &ContractSource) -> Option<String> {
    let stream = tokenize(source).ok()?;
    let first_code = stream.tokens.first().map_or(source.text.len(), |t| t.span.0);
    let mut lines = Vec::new();
    let mut cursor = 0usize;
    for &(start, end) in &stream.skipped {
        if start >= first_code {
            break;
        }
        if !source.text[cursor..start].trim().is_empty() {
            break;
        }
        let raw = &source.text[start..end];
        for line in raw.lines() {
            let cleaned = line
                .trim()
                .trim_start_matches("///")
                .trim_start_matches("//")
                .trim_start_matches("/**")
                .trim_start_matches("/*")
                .trim_end_matches("*/")
                .trim_start_matches('*')
                .trim();
            if !cleaned.is_empty() {
                lines.push(cleaned.to_string());
            }
        }
        cursor = end;
    }
    if lines.is_empty() {
        None
    } else {
        Some(lines.join(" "))
    }
}
