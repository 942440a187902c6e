//! Byte-pair tokenizer. The six reserved strings (the three infilling
//! sentinels, the two tag brackets and end-of-text) are atoms: they encode
//! to exactly one id each and can never be produced by byte merges, so the
//! staged training formats stay well-posed. All 256 byte values are base
//! tokens, which makes encoding total — no unknown-token id exists.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub const SPECIALS: &[&str] = &[
    datasetgen::SENTINEL_PRE,
    datasetgen::SENTINEL_SUF,
    datasetgen::SENTINEL_MID,
    datasetgen::TAG_OPEN,
    datasetgen::TAG_CLOSE,
    EOT_STR,
];
pub const EOT_STR: &str = "<EOT>";
pub const EOT: u32 = 5;
const NUM_SPECIALS: u32 = 6;
const BYTE_BASE: u32 = NUM_SPECIALS;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BpeTokenizer {
    /// Learned merges in priority order; each pair is over existing ids
    /// and mints id `NUM_SPECIALS + 256 + index`.
    merges: Vec<(u32, u32)>,
    #[serde(skip)]
    merge_rank: HashMap<(u32, u32), u32>,
}

impl BpeTokenizer {
    /// Byte-level tokenizer with no merges.
    pub fn byte_level() -> Self {
        Self::from_merges(Vec::new())
    }

    pub fn from_merges(merges: Vec<(u32, u32)>) -> Self {
        let merge_rank = merges
            .iter()
            .enumerate()
            .map(|(i, &pair)| (pair, i as u32))
            .collect();
        Self { merges, merge_rank }
    }

    /// Learn up to `num_merges` byte-pair merges from the corpus. Reserved
    /// strings are removed from the text before counting, so no merge can
    /// straddle or rebuild them.
    pub fn train(corpus: &[&str], num_merges: usize) -> Self {
        let mut segments: Vec<Vec<u32>> = corpus
            .iter()
            .flat_map(|text| split_specials(text))
            .filter_map(|piece| match piece {
                Piece::Special(_) => None,
                Piece::Raw(s) => Some(s.bytes().map(|b| BYTE_BASE + u32::from(b)).collect()),
            })
            .collect();
        let mut merges = Vec::new();
        for _ in 0..num_merges {
            let mut counts: HashMap<(u32, u32), usize> = HashMap::new();
            for seg in &segments {
                for w in seg.windows(2) {
                    *counts.entry((w[0], w[1])).or_insert(0) += 1;
                }
            }
            // Deterministic tie-break: highest count, then smallest pair.
            let best = counts
                .into_iter()
                .filter(|&(_, c)| c >= 2)
                .max_by_key(|&(pair, c)| (c, std::cmp::Reverse(pair)));
            let Some((pair, _)) = best else { break };
            let new_id = NUM_SPECIALS + 256 + merges.len() as u32;
            merges.push(pair);
            for seg in &mut segments {
                apply_merge(seg, pair, new_id);
            }
        }
        Self::from_merges(merges)
    }

    pub fn vocab_size(&self) -> usize {
        (NUM_SPECIALS + 256) as usize + self.merges.len()
    }

    pub fn merges(&self) -> &[(u32, u32)] {
        &self.merges
    }

    pub fn encode(&self, text: &str) -> Vec<u32> {
        let mut out = Vec::new();
        for piece in split_specials(text) {
            match piece {
                Piece::Special(id) => out.push(id),
                Piece::Raw(s) => {
                    let mut seg: Vec<u32> =
                        s.bytes().map(|b| BYTE_BASE + u32::from(b)).collect();
                    // Apply merges best-rank-first until none fit.
                    loop {
                        let best = seg
                            .windows(2)
                            .filter_map(|w| self.merge_rank.get(&(w[0], w[1])).copied())
                            .min();
                        let Some(rank) = best else { break };
                        let pair = self.merges[rank as usize];
                        apply_merge(&mut seg, pair, NUM_SPECIALS + 256 + rank);
                    }
                    out.extend(seg);
                }
            }
        }
        out
    }

    pub fn decode(&self, tokens: &[u32]) -> String {
        let mut bytes = Vec::new();
        for &t in tokens {
            self.token_bytes(t, &mut bytes);
        }
        String::from_utf8_lossy(&bytes).into_owned()
    }

    fn token_bytes(&self, token: u32, out: &mut Vec<u8>) {
        if token < NUM_SPECIALS {
            out.extend_from_slice(SPECIALS[token as usize].as_bytes());
        } else if token < NUM_SPECIALS + 256 {
            out.push((token - BYTE_BASE) as u8);
        } else {
            let (a, b) = self.merges[(token - NUM_SPECIALS - 256) as usize];
            self.token_bytes(a, out);
            self.token_bytes(b, out);
        }
    }
}

enum Piece<'a> {
    Special(u32),
    Raw(&'a str),
}

/// Split text on reserved strings, longest match first at each position.
fn split_specials(text: &str) -> Vec<Piece<'_>> {
    let mut pieces = Vec::new();
    let mut raw_start = 0;
    let mut i = 0;
    let bytes = text.as_bytes();
    while i < bytes.len() {
        let mut matched = None;
        for (id, special) in SPECIALS.iter().enumerate() {
            if bytes[i..].starts_with(special.as_bytes()) {
                match matched {
                    Some((_, len)) if special.len() <= len => {}
                    _ => matched = Some((id as u32, special.len())),
                }
            }
        }
        if let Some((id, len)) = matched {
            if raw_start < i {
                pieces.push(Piece::Raw(&text[raw_start..i]));
            }
            pieces.push(Piece::Special(id));
            i += len;
            raw_start = i;
        } else {
            i += 1;
        }
    }
    if raw_start < bytes.len() {
        pieces.push(Piece::Raw(&text[raw_start..]));
    }
    pieces
}

fn apply_merge(seg: &mut Vec<u32>, pair: (u32, u32), new_id: u32) {
    let mut out = Vec::with_capacity(seg.len());
    let mut i = 0;
    while i < seg.len() {
        if i + 1 < seg.len() && (seg[i], seg[i + 1]) == pair {
            out.push(new_id);
            i += 2;
        } else {
            out.push(seg[i]);
            i += 1;
        }
    }
    *seg = out;
}
