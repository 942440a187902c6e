//! Modified n-gram precision BLEU with epsilon smoothing, plus the
//! keyword-weighted variant used as a CodeBLEU component.

use crate::{MetricConfig, MetricError};
use solfront::is_keyword;
use std::collections::HashMap;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts: HashMap<&[String], usize> = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

fn precision(
    candidate: &[String],
    reference: &[String],
    n: usize,
    epsilon: f64,
    weight_of: &dyn Fn(&[String]) -> f64,
) -> f64 {
    let cand = ngram_counts(candidate, n);
    let refr = ngram_counts(reference, n);
    let mut matched = 0.0;
    let mut total = 0.0;
    for (gram, &count) in &cand {
        let w = weight_of(gram);
        let clipped = count.min(refr.get(gram).copied().unwrap_or(0));
        matched += w * clipped as f64;
        total += w * count as f64;
    }
    if total == 0.0 {
        return epsilon;
    }
    matched.max(epsilon) / total
}

fn brevity_penalty(candidate_len: usize, reference_len: usize) -> f64 {
    (1.0 - reference_len as f64 / candidate_len as f64).min(0.0).exp()
}

fn geometric_bleu(
    candidate: &[String],
    reference: &[String],
    cfg: &MetricConfig,
    weight_of: &dyn Fn(&[String]) -> f64,
) -> Result<f64, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    for n in 1..=cfg.max_n {
        log_sum += precision(candidate, reference, n, cfg.smoothing_epsilon, weight_of).ln();
    }
    let mean = (log_sum / cfg.max_n as f64).exp();
    Ok(brevity_penalty(candidate.len(), reference.len()) * mean)
}

/// Geometric mean of modified n-gram precisions (zero counts smoothed to
/// `smoothing_epsilon`) times the brevity penalty
/// `exp(min(0, 1 - |ref|/|cand|))`.
pub fn bleu(
    candidate: &[String],
    reference: &[String],
    cfg: &MetricConfig,
) -> Result<f64, MetricError> {
    geometric_bleu(candidate, reference, cfg, &|_| 1.0)
}

/// BLEU where every n-gram starting with a Solidity keyword counts
/// `keyword_weight` times, in both the clipped and total tallies.
pub fn weighted_ngram_match(
    candidate: &[String],
    reference: &[String],
    cfg: &MetricConfig,
) -> Result<f64, MetricError> {
    let kw = cfg.keyword_weight;
    geometric_bleu(candidate, reference, cfg, &|gram| {
        if gram.first().is_some_and(|t| is_keyword(t)) {
            kw
        } else {
            1.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<String> {
        text.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn identical_sequences_score_one() {
        let cfg = MetricConfig::default();
        let t = toks("require ( a > 0 ) ;");
        assert!((bleu(&t, &t, &cfg).unwrap() - 1.0).abs() < 1e-12);
        assert!((weighted_ngram_match(&t, &t, &cfg).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn brevity_penalty_hand_case() {
        let cfg = MetricConfig::default();
        let cand = toks("a b a b c");
        let refr = toks("a b a b c d e");
        let got = bleu(&cand, &refr, &cfg).unwrap();
        assert!((got - (-0.4f64).exp()).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn empty_candidate_scores_zero() {
        let cfg = MetricConfig::default();
        assert_eq!(bleu(&[], &toks("a b"), &cfg).unwrap(), 0.0);
    }

    #[test]
    fn empty_reference_is_error() {
        let cfg = MetricConfig::default();
        assert!(matches!(
            bleu(&toks("a"), &[], &cfg),
            Err(MetricError::EmptyReference)
        ));
    }

    #[test]
    fn keyword_weight_one_collapses_to_bleu() {
        let cfg = MetricConfig {
            keyword_weight: 1.0,
            ..MetricConfig::default()
        };
        let cand = toks("uint a = b + 1 ;");
        let refr = toks("uint a = c + 2 ;");
        assert!(
            (bleu(&cand, &refr, &cfg).unwrap()
                - weighted_ngram_match(&cand, &refr, &cfg).unwrap())
            .abs()
                < 1e-12
        );
    }

    #[test]
    fn keyword_divergence_hurts_more_than_identifier_divergence() {
        let cfg = MetricConfig::default();
        let reference = toks("require ( cond ) ; x y z w ;");
        // Same edit size: one token replaced, keyword vs identifier.
        let kw_diverged = toks("assert ( cond ) ; x y z w ;");
        let id_diverged = toks("require ( cond ) ; x y z v ;");
        let kw_score = weighted_ngram_match(&kw_diverged, &reference, &cfg).unwrap();
        let id_score = weighted_ngram_match(&id_diverged, &reference, &cfg).unwrap();
        assert!(kw_score < id_score, "{kw_score} vs {id_score}");
    }
}
