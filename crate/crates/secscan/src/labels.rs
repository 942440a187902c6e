//! Corpus labeling: run the detectors over every contract and emit
//! security/vulnerable labels in the dataset builder's JSONL schema
//! (`{"id": ..., "label": "security"|"vulnerable"}`).

use crate::detectors::detect;
use serde::{Deserialize, Serialize};
use solfront::ContractSource;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusLabel {
    pub id: String,
    pub label: String,
}

/// Label every contract: vulnerable iff the detectors report at least one
/// finding of any class. Files whose analysis fails are excluded and
/// returned separately — an unanalyzable file must not be labeled secure.
pub fn label_corpus(corpus: &[(String, ContractSource)]) -> (Vec<CorpusLabel>, Vec<String>) {
    let mut labels = Vec::new();
    let mut excluded = Vec::new();
    for (id, source) in corpus {
        let outcome = detect(source);
        if outcome.analysis_failed {
            excluded.push(id.clone());
            continue;
        }
        labels.push(CorpusLabel {
            id: id.clone(),
            label: if outcome.findings.is_empty() {
                "security".to_string()
            } else {
                "vulnerable".to_string()
            },
        });
    }
    (labels, excluded)
}
