//! The single TOML config file every subcommand reads. All keys have
//! defaults except the input/output paths; any key can be overridden by
//! re-serializing, and the seed by the `--seed` flag.

use crate::ForgeError;
use codemetrics::MetricConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use tinylm::{SamplerConfig, TrainConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct StageToggles {
    pub ci: bool,
    pub vd: bool,
    pub ti: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        Self {
            ci: true,
            vd: true,
            ti: true,
        }
    }
}

/// Model shape. `vocab_size` is not a key: it is derived from the
/// tokenizer trained on the ingested corpus (byte vocabulary + specials +
/// `num_merges` learned merges).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub num_merges: usize,
    pub embed_dim: usize,
    pub num_layers: usize,
    pub num_heads: usize,
    pub context_len: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            num_merges: 250,
            embed_dim: 128,
            num_layers: 4,
            num_heads: 4,
            context_len: 512,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ToolPaths {
    pub solc_path: Option<PathBuf>,
    pub slither_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub corpus_dir: PathBuf,
    pub labels_path: PathBuf,
    pub tasks_path: PathBuf,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub samples_per_task: usize,
    /// Each stage normally starts from the previous stage's adapters;
    /// true gives every stage fresh adapters for ablation runs.
    pub fresh_adapters: bool,
    pub stages: StageToggles,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub sampler: SamplerConfig,
    pub metrics: MetricConfig,
    pub tools: ToolPaths,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            corpus_dir: PathBuf::from("corpus"),
            labels_path: PathBuf::from("labels.jsonl"),
            tasks_path: PathBuf::from("tasks.jsonl"),
            output_dir: PathBuf::from("out"),
            seed: 0,
            samples_per_task: 5,
            fresh_adapters: false,
            stages: StageToggles::default(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            sampler: SamplerConfig::default(),
            metrics: MetricConfig::default(),
            tools: ToolPaths::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, ForgeError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ForgeError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: PipelineConfig = toml::from_str(&text)
            .map_err(|e| ForgeError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ForgeError> {
        if self.samples_per_task == 0 {
            return Err(ForgeError::Config("samples_per_task must be >= 1".into()));
        }
        self.train
            .validate()
            .map_err(|e| ForgeError::Config(e.to_string()))?;
        self.sampler
            .validate()
            .map_err(|e| ForgeError::Config(e.to_string()))?;
        self.metrics
            .validate()
            .map_err(|e| ForgeError::Config(e.to_string()))?;
        if self.model.embed_dim == 0
            || self.model.num_heads == 0
            || self.model.embed_dim % self.model.num_heads != 0
        {
            return Err(ForgeError::Config(
                "model.embed_dim must be a positive multiple of model.num_heads".into(),
            ));
        }
        Ok(())
    }

    /// Fail with the config exit code when a referenced input path is
    /// absent. Called per command for the paths that command consumes.
    pub fn require_input(&self, path: &Path, what: &str) -> Result<(), ForgeError> {
        if path.exists() {
            Ok(())
        } else {
            Err(ForgeError::Config(format!(
                "{what} not found: {}",
                path.display()
            )))
        }
    }

    pub fn artifact(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }
}
