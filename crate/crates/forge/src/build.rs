//! Dataset building: turn the ingested corpus (plus labels) into the
//! per-stage train/valid/test JSONL files.

use crate::config::PipelineConfig;
use crate::ingest::load_corpus;
use crate::ForgeError;
use datasetgen::{
    build_ci_dataset, build_ti_dataset, build_vd_dataset, extract_instruction, read_labels,
    split_811, write_records, Stage, Tag,
};
use solfront::strip_comments;
use std::collections::HashMap;

pub fn dataset_file(stage: Stage, part: &str) -> String {
    format!("{}_{part}.jsonl", stage.as_str().to_lowercase())
}

fn label_map(cfg: &PipelineConfig) -> Result<HashMap<String, Tag>, ForgeError> {
    cfg.require_input(&cfg.labels_path, "labels file")?;
    let labels = read_labels(&cfg.labels_path)?;
    let mut map = HashMap::new();
    for entry in labels {
        let tag = match entry.label.as_str() {
            "security" => Tag::Security,
            "vulnerable" => Tag::Vulnerable,
            other => {
                return Err(ForgeError::Config(format!(
                    "label for {} must be security|vulnerable, got {other}",
                    entry.id
                )))
            }
        };
        map.insert(entry.id, tag);
    }
    Ok(map)
}

/// Build one stage's dataset and write its three split files. Returns the
/// (train, valid, test) sizes.
pub fn cmd_build(cfg: &PipelineConfig, stage: Stage) -> Result<(usize, usize, usize), ForgeError> {
    let corpus = load_corpus(cfg)?;
    let records = match stage {
        Stage::Ci => build_ci_dataset(&corpus, cfg.seed)?.0,
        Stage::Vd => {
            let labels = label_map(cfg)?;
            let labeled: Vec<_> = corpus
                .into_iter()
                .filter_map(|(id, source)| labels.get(&id).map(|&tag| (id, source, tag)))
                .collect();
            build_vd_dataset(&labeled)?
        }
        Stage::Ti => {
            let labels = label_map(cfg)?;
            let mut items = Vec::new();
            for (id, source) in corpus {
                let Some(&tag) = labels.get(&id) else {
                    continue;
                };
                let Some(instruction) = extract_instruction(&source) else {
                    continue;
                };
                let code = strip_comments(&source)
                    .map_err(|e| ForgeError::Other(e.to_string()))?
                    .text;
                items.push((id, instruction, code, tag));
            }
            build_ti_dataset(&items)?
        }
    };
    let split = split_811(&records, cfg.seed)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    for (part, slice) in [
        ("train", &split.train),
        ("valid", &split.valid),
        ("test", &split.test),
    ] {
        write_records(&cfg.artifact(&dataset_file(stage, part)), slice)?;
    }
    Ok((split.train.len(), split.valid.len(), split.test.len()))
}
