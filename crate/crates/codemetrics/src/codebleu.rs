//! The combined CodeBLEU score. Both sides are comment-stripped first;
//! the candidate is allowed to be malformed — a candidate that fails to
//! parse (or even lex) gets zero for the affected components and a flag,
//! never an aborted evaluation.

use crate::bleu::{bleu, weighted_ngram_match};
use crate::{MetricConfig, MetricError};
use serde::{Deserialize, Serialize};
use solfront::{
    def_use_edges, parse, strip_comments, subtrees, tokenize, ContractAst, ContractSource,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleScores {
    pub bleu: f64,
    pub cb: f64,
    /// (ngram, weighted_ngram, ast_match, dataflow_match)
    pub components: [f64; 4],
    /// True when the candidate could not be lexed or parsed and the
    /// syntax/dataflow components were pinned to zero.
    pub analysis_failed: bool,
}

/// Fraction of the candidate's depth>=2 normalized subtrees found in the
/// reference multiset.
pub fn ast_match(candidate: &ContractAst, reference: &ContractAst) -> f64 {
    let cand = subtrees(candidate, 2);
    let refr = subtrees(reference, 2);
    let total: usize = cand.values().sum();
    if total == 0 {
        return 0.0;
    }
    let matched: usize = cand
        .iter()
        .map(|(tree, &count)| count.min(refr.get(tree).copied().unwrap_or(0)))
        .sum();
    matched as f64 / total as f64
}

/// Fraction of candidate def-use edges present in the reference edge set.
/// An edge-free candidate scores 1 against an edge-free reference.
pub fn dataflow_match(candidate: &ContractAst, reference: &ContractAst) -> f64 {
    let cand = def_use_edges(candidate);
    let refr = def_use_edges(reference);
    if cand.is_empty() {
        return if refr.is_empty() { 1.0 } else { 0.0 };
    }
    let matched = cand.intersection(&refr).count();
    matched as f64 / cand.len() as f64
}

pub fn codebleu(
    candidate_src: &ContractSource,
    reference_src: &ContractSource,
    cfg: &MetricConfig,
) -> Result<SampleScores, MetricError> {
    cfg.validate()?;
    let reference = strip_comments(reference_src)?;
    let ref_stream = tokenize(&reference)?;
    if ref_stream.tokens.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let ref_ast = parse(&ref_stream)?;
    let ref_tokens: Vec<String> = ref_stream.tokens.iter().map(|t| t.lexeme.clone()).collect();

    // Candidate side is best-effort.
    let cand_stream = strip_comments(candidate_src)
        .and_then(|stripped| tokenize(&stripped))
        .ok();
    let (cand_tokens, cand_ast, mut analysis_failed) = match cand_stream {
        Some(stream) => {
            let tokens: Vec<String> = stream.tokens.iter().map(|t| t.lexeme.clone()).collect();
            match parse(&stream) {
                Ok(ast) => (tokens, Some(ast), false),
                Err(_) => (tokens, None, true),
            }
        }
        None => (Vec::new(), None, true),
    };

    let ngram = bleu(&cand_tokens, &ref_tokens, cfg)?;
    let weighted = weighted_ngram_match(&cand_tokens, &ref_tokens, cfg)?;
    let (ast_score, flow_score) = match &cand_ast {
        Some(ast) => (ast_match(ast, &ref_ast), dataflow_match(ast, &ref_ast)),
        None => {
            analysis_failed = true;
            (0.0, 0.0)
        }
    };
    let components = [ngram, weighted, ast_score, flow_score];
    let [a, b, g, d] = cfg.codebleu_weights;
    let cb = a * ngram + b * weighted + g * ast_score + d * flow_score;
    Ok(SampleScores {
        bleu: ngram,
        cb,
        components,
        analysis_failed,
    })
}
