//! Compile/vulnerability rate summary. Definitions are fixed and
//! internally consistent:
//!   com_pass   = compiled / total
//!   vul_rate   = compiled-with-findings / compiled   (0 if nothing compiled)
//!   safe_aval  = compiled-without-findings / total
//! all expressed as percentages rounded to two decimals.

use crate::{CompileResult, SecError, VulnFinding};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SummaryCounts {
    pub total: usize,
    pub compiled: usize,
    pub compiled_with_findings: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SecuritySummary {
    pub com_pass: f64,
    pub vul_rate: f64,
    pub safe_aval: f64,
    pub counts: SummaryCounts,
    /// True when any sample's compile verdict came from the internal
    /// parser rather than a real compiler.
    pub approximate: bool,
}

fn pct(numerator: usize, denominator: usize) -> f64 {
    if denominator == 0 {
        return 0.0;
    }
    let raw = numerator as f64 / denominator as f64 * 100.0;
    (raw * 100.0).round() / 100.0
}

pub fn security_metrics(
    results: &[(CompileResult, Vec<VulnFinding>)],
) -> Result<SecuritySummary, SecError> {
    if results.is_empty() {
        return Err(SecError::EmptyResults);
    }
    let total = results.len();
    let compiled = results.iter().filter(|(c, _)| c.compiled).count();
    let compiled_with_findings = results
        .iter()
        .filter(|(c, findings)| c.compiled && !findings.is_empty())
        .count();
    let approximate = results
        .iter()
        .any(|(c, _)| c.tool == crate::CompileTool::InternalParser);
    Ok(SecuritySummary {
        com_pass: pct(compiled, total),
        vul_rate: pct(compiled_with_findings, compiled),
        safe_aval: pct(compiled - compiled_with_findings, total),
        counts: SummaryCounts {
            total,
            compiled,
            compiled_with_findings,
        },
        approximate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CompileTool, Confidence, VulnClass};
    use proptest::prelude::*;

    fn sample(compiled: bool, vulnerable: bool) -> (CompileResult, Vec<VulnFinding>) {
        let findings = if vulnerable {
            vec![VulnFinding {
                class: VulnClass::RE,
                span: (0, 1),
                detector: "test".into(),
                confidence: Confidence::High,
            }]
        } else {
            Vec::new()
        };
        (
            CompileResult {
                compiled,
                tool: CompileTool::InternalParser,
                diagnostics: Vec::new(),
            },
            findings,
        )
    }

    #[test]
    fn all_clean_is_all_hundred() {
        let results: Vec<_> = (0..4).map(|_| sample(true, false)).collect();
        let s = security_metrics(&results).unwrap();
        assert_eq!((s.com_pass, s.vul_rate, s.safe_aval), (100.0, 0.0, 100.0));
    }

    #[test]
    fn nothing_compiled_is_all_zero() {
        let results: Vec<_> = (0..3).map(|_| sample(false, false)).collect();
        let s = security_metrics(&results).unwrap();
        assert_eq!((s.com_pass, s.vul_rate, s.safe_aval), (0.0, 0.0, 0.0));
    }

    #[test]
    fn counting_oracle_205_178_54() {
        let mut results = Vec::new();
        for i in 0..205 {
            let compiled = i < 178;
            let vulnerable = compiled && i < 54;
            results.push(sample(compiled, vulnerable));
        }
        let s = security_metrics(&results).unwrap();
        assert_eq!(s.com_pass, 86.83);
        assert_eq!(s.vul_rate, 30.34);
        assert_eq!(s.safe_aval, 60.49);
        assert_eq!(s.counts.compiled_with_findings, 54);
    }

    #[test]
    fn empty_input_is_error() {
        assert!(matches!(
            security_metrics(&[]),
            Err(SecError::EmptyResults)
        ));
    }

    proptest! {
        #[test]
        fn matches_counting_oracle_and_invariants(flags in prop::collection::vec((any::<bool>(), any::<bool>()), 1..200)) {
            let results: Vec<_> = flags
                .iter()
                .map(|&(c, v)| sample(c, c && v))
                .collect();
            let s = security_metrics(&results).unwrap();

            // Independent recount.
            let total = flags.len();
            let compiled = flags.iter().filter(|(c, _)| *c).count();
            let bad = flags.iter().filter(|&&(c, v)| c && v).count();
            let round2 = |x: f64| (x * 100.0).round() / 100.0;
            prop_assert_eq!(s.com_pass, round2(compiled as f64 / total as f64 * 100.0));
            if compiled > 0 {
                prop_assert_eq!(s.vul_rate, round2(bad as f64 / compiled as f64 * 100.0));
            } else {
                prop_assert_eq!(s.vul_rate, 0.0);
            }
            prop_assert_eq!(s.safe_aval, round2((compiled - bad) as f64 / total as f64 * 100.0));

            prop_assert!(s.safe_aval <= s.com_pass + 1e-9);
            for v in [s.com_pass, s.vul_rate, s.safe_aval] {
                prop_assert!((0.0..=100.0).contains(&v));
            }
            if s.vul_rate == 0.0 {
                prop_assert!((s.safe_aval - s.com_pass).abs() < 1e-9);
            }
        }
    }
}
