//! Staged training: each stage's adapters start from the previous
//! enabled stage's checkpoint (the θ → θ_I → θ_D chain), or from a fresh
//! base when there is none. The base model itself is built once, with a
//! byte-pair tokenizer learned from the ingested corpus.

use crate::build::dataset_file;
use crate::config::PipelineConfig;
use crate::ingest::load_corpus;
use crate::ForgeError;
use datasetgen::{derive_seed, read_records, Stage};
use serde::Serialize;
use solfront::strip_comments;
use std::path::PathBuf;
use tinylm::{
    load_checkpoint, save_checkpoint, train_stage, AdapterWeights, BpeTokenizer, EpochLog, TinyLm,
    TinyLmConfig,
};

pub fn checkpoint_file(stage: Stage) -> String {
    format!("ckpt_{}.tlmc", stage.as_str().to_lowercase())
}

pub fn train_log_file(stage: Stage) -> String {
    format!("train_log_{}.jsonl", stage.as_str().to_lowercase())
}

/// The previous enabled stage whose checkpoint this stage chains from.
fn previous_stage(cfg: &PipelineConfig, stage: Stage) -> Option<Stage> {
    match stage {
        Stage::Ci => None,
        Stage::Vd => cfg.stages.ci.then_some(Stage::Ci),
        Stage::Ti => {
            if cfg.stages.vd {
                Some(Stage::Vd)
            } else if cfg.stages.ci {
                Some(Stage::Ci)
            } else {
                None
            }
        }
    }
}

/// Fresh base model plus zero-initialized adapters: tokenizer trained on
/// the comment-stripped corpus, weights drawn from the config seed.
pub fn base_model(cfg: &PipelineConfig) -> Result<(TinyLm, AdapterWeights), ForgeError> {
    let corpus = load_corpus(cfg)?;
    let mut texts = Vec::with_capacity(corpus.len());
    for (_, source) in &corpus {
        texts.push(
            strip_comments(source)
                .map_err(|e| ForgeError::Other(e.to_string()))?
                .text,
        );
    }
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let tokenizer = BpeTokenizer::train(&refs, cfg.model.num_merges);
    let model_cfg = TinyLmConfig {
        vocab_size: tokenizer.vocab_size(),
        embed_dim: cfg.model.embed_dim,
        num_layers: cfg.model.num_layers,
        num_heads: cfg.model.num_heads,
        context_len: cfg.model.context_len,
        seed: cfg.seed,
    };
    let model = TinyLm::new(model_cfg, tokenizer)?;
    let adapters = AdapterWeights::init(
        &model.cfg,
        cfg.train.lora_r,
        cfg.train.lora_alpha,
        derive_seed(cfg.seed, "adapters", 0),
    )?;
    Ok((model, adapters))
}

#[derive(Serialize)]
struct LogLine<'a> {
    stage: &'a str,
    epoch: usize,
    mean_loss: f64,
    records: usize,
}

fn write_train_log(path: &PathBuf, logs: &[EpochLog]) -> Result<(), ForgeError> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for log in logs {
        let line = LogLine {
            stage: log.stage.as_str(),
            epoch: log.epoch,
            mean_loss: log.mean_loss,
            records: log.records,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Train one stage and save its checkpoint plus the per-epoch loss log.
pub fn cmd_train(cfg: &PipelineConfig, stage: Stage) -> Result<Vec<EpochLog>, ForgeError> {
    let data_path = cfg.artifact(&dataset_file(stage, "train"));
    if !data_path.exists() {
        return Err(ForgeError::Missing(format!(
            "{} (run build --stage {} first)",
            data_path.display(),
            stage.as_str().to_lowercase()
        )));
    }
    let dataset = read_records(&data_path)?;

    let (model, mut adapters) = match previous_stage(cfg, stage) {
        Some(prev) => {
            let prev_path = cfg.artifact(&checkpoint_file(prev));
            if !prev_path.exists() {
                return Err(ForgeError::Missing(format!(
                    "{} (run train --stage {} first)",
                    prev_path.display(),
                    prev.as_str().to_lowercase()
                )));
            }
            let ckpt = load_checkpoint(&prev_path)?;
            (ckpt.model, ckpt.adapters)
        }
        None => base_model(cfg)?,
    };
    if cfg.fresh_adapters {
        adapters = AdapterWeights::init(
            &model.cfg,
            cfg.train.lora_r,
            cfg.train.lora_alpha,
            derive_seed(cfg.seed, "adapters", 0),
        )?;
    }

    let (trained, logs) = train_stage(&model, &adapters, &dataset, &cfg.train, stage)?;
    save_checkpoint(&cfg.artifact(&checkpoint_file(stage)), &model, &trained, cfg.seed)?;
    write_train_log(&cfg.artifact(&train_log_file(stage)), &logs)?;
    Ok(logs)
}
