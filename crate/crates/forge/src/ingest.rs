//! Corpus ingestion: read every `.sol` file, keep the single-contract
//! files that parse cleanly, and write `corpus_manifest.json` with the
//! counts and the kept file list.

use crate::config::PipelineConfig;
use crate::ForgeError;
use serde::{Deserialize, Serialize};
use solfront::{parse, strip_comments, tokenize, ContractSource};

pub const CORPUS_MANIFEST: &str = "corpus_manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KeptFile {
    pub id: String,
    pub file: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub total: usize,
    pub kept: usize,
    pub dropped_multi_contract: usize,
    pub dropped_unparseable: usize,
    pub files: Vec<KeptFile>,
}

pub fn cmd_ingest(cfg: &PipelineConfig) -> Result<CorpusManifest, ForgeError> {
    let entries = std::fs::read_dir(&cfg.corpus_dir).map_err(|e| {
        ForgeError::Config(format!(
            "cannot read corpus_dir {}: {e}",
            cfg.corpus_dir.display()
        ))
    })?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "sol"))
        .collect();
    paths.sort();

    let mut manifest = CorpusManifest::default();
    for path in paths {
        manifest.total += 1;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let keep = std::fs::read_to_string(&path)
            .map_err(|e| ForgeError::Other(format!("{}: {e}", path.display())))
            .and_then(|text| {
                let source = ContractSource::new(text, id.clone())
                    .map_err(|e| ForgeError::Other(e.to_string()))?;
                let stripped = strip_comments(&source).map_err(|e| ForgeError::Other(e.to_string()))?;
                let stream = tokenize(&stripped).map_err(|e| ForgeError::Other(e.to_string()))?;
                let ast = parse(&stream).map_err(|e| ForgeError::Other(e.to_string()))?;
                Ok(solfront::is_single_contract(&ast))
            });
        match keep {
            Ok(true) => {
                manifest.kept += 1;
                manifest.files.push(KeptFile {
                    id,
                    file: path
                        .file_name()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                });
            }
            Ok(false) => manifest.dropped_multi_contract += 1,
            Err(_) => manifest.dropped_unparseable += 1,
        }
    }

    std::fs::create_dir_all(&cfg.output_dir)?;
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    std::fs::write(cfg.artifact(CORPUS_MANIFEST), json)?;
    Ok(manifest)
}

/// Reload the kept corpus per the ingest manifest. Fails with the
/// missing-artifact code until `ingest` has run.
pub fn load_corpus(cfg: &PipelineConfig) -> Result<Vec<(String, ContractSource)>, ForgeError> {
    let path = cfg.artifact(CORPUS_MANIFEST);
    let text = std::fs::read_to_string(&path)
        .map_err(|_| ForgeError::Missing(format!("{} (run ingest first)", path.display())))?;
    let manifest: CorpusManifest = serde_json::from_str(&text)?;
    let mut corpus = Vec::with_capacity(manifest.files.len());
    for kept in &manifest.files {
        let file = cfg.corpus_dir.join(&kept.file);
        let text = std::fs::read_to_string(&file)
            .map_err(|e| ForgeError::Other(format!("{}: {e}", file.display())))?;
        let source = ContractSource::new(text, kept.id.clone())
            .map_err(|e| ForgeError::Other(e.to_string()))?;
        corpus.push((kept.id.clone(), source));
    }
    Ok(corpus)
}
