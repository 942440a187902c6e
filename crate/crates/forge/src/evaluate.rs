//! Evaluation: score every generated sample against its task's reference
//! (BLEU + the four-component composite), compile-check and scan it, and
//! aggregate into the single summary the report renders. A sample that
//! fails to parse scores what it can and never aborts the run.

use crate::config::PipelineConfig;
use crate::generate::SAMPLES_FILE;
use crate::tasks::{read_samples, read_tasks, write_jsonl, Task};
use crate::ForgeError;
use codemetrics::{aggregate, codebleu, SampleScores};
use secscan::{compile_check, detect, security_metrics, slither_adapter, DetectorMap, VulnFinding};
use serde::{Deserialize, Serialize};
use solfront::ContractSource;
use std::collections::BTreeMap;
use std::path::Path;

pub const SCORES_FILE: &str = "scores.jsonl";
pub const FINDINGS_FILE: &str = "findings.jsonl";
pub const SECURITY_FILE: &str = "security_summary.json";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Serialize, Deserialize)]
pub struct ScoreLine {
    pub task_id: String,
    pub sample_index: usize,
    pub bleu: f64,
    pub cb: f64,
    pub components: [f64; 4],
    pub analysis_failed: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FindingLine {
    pub task_id: String,
    pub sample_index: usize,
    pub compiled: bool,
    pub findings: Vec<VulnFinding>,
}

/// The seven report columns plus the counts backing them. BLEU-family
/// values are fractions in [0,1]; the security rates are percentages.
#[derive(Debug, Serialize, Deserialize)]
pub struct Summary {
    pub avg_bleu: f64,
    pub best_bleu: f64,
    pub avg_cb: f64,
    pub best_cb: f64,
    pub com_pass: f64,
    pub vul_rate: f64,
    pub safe_aval: f64,
    pub tasks: usize,
    pub samples: usize,
    /// True when any compile check used the internal fallback rather
    /// than an external compiler.
    pub approximate_compile: bool,
}

fn scan_sample(
    cfg: &PipelineConfig,
    candidate: &ContractSource,
) -> Result<(secscan::CompileResult, Vec<VulnFinding>), ForgeError> {
    let compile = compile_check(candidate, cfg.tools.solc_path.as_deref())?;
    let mut findings = detect(candidate).findings;
    if let Some(slither) = &cfg.tools.slither_path {
        let map = DetectorMap::default();
        let (external, _gaps) = slither_adapter(candidate, slither, &map)?;
        findings.extend(external);
    }
    Ok((compile, findings))
}

pub fn cmd_evaluate(cfg: &PipelineConfig) -> Result<Summary, ForgeError> {
    cfg.require_input(&cfg.tasks_path, "tasks file")?;
    let tasks = read_tasks(&cfg.tasks_path)?;
    let samples_path = cfg.artifact(SAMPLES_FILE);
    if !samples_path.exists() {
        return Err(ForgeError::Missing(format!(
            "{} (run generate first)",
            samples_path.display()
        )));
    }
    let samples = read_samples(&samples_path)?;
    if samples.is_empty() {
        return Err(ForgeError::Missing(format!(
            "{} is empty",
            samples_path.display()
        )));
    }
    let by_id: BTreeMap<&str, &Task> = tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();

    let mut score_lines = Vec::with_capacity(samples.len());
    let mut finding_lines = Vec::with_capacity(samples.len());
    let mut per_task: BTreeMap<&str, Vec<SampleScores>> = BTreeMap::new();
    let mut security_inputs = Vec::with_capacity(samples.len());
    for sample in &samples {
        let task = by_id.get(sample.task_id.as_str()).ok_or_else(|| {
            ForgeError::Other(format!("sample references unknown task {}", sample.task_id))
        })?;
        let reference = ContractSource::new(task.reference_code.clone(), task.task_id.clone())
            .map_err(|e| ForgeError::Config(format!("task {}: {e}", task.task_id)))?;
        let candidate = ContractSource::generated(sample.code.clone());
        let scores = codebleu(&candidate, &reference, &cfg.metrics)?;
        score_lines.push(ScoreLine {
            task_id: sample.task_id.clone(),
            sample_index: sample.sample_index,
            bleu: scores.bleu,
            cb: scores.cb,
            components: scores.components,
            analysis_failed: scores.analysis_failed,
        });
        per_task.entry(&task.task_id).or_default().push(scores);

        let (compile, findings) = scan_sample(cfg, &candidate)?;
        finding_lines.push(FindingLine {
            task_id: sample.task_id.clone(),
            sample_index: sample.sample_index,
            compiled: compile.compiled,
            findings: findings.clone(),
        });
        security_inputs.push((compile, findings));
    }

    // Macro average: aggregate within each task, then average the tasks.
    let mut sums = [0.0f64; 4];
    for scores in per_task.values() {
        let agg = aggregate(scores)?;
        sums[0] += agg.avg_bleu;
        sums[1] += agg.best_bleu;
        sums[2] += agg.avg_cb;
        sums[3] += agg.best_cb;
    }
    let task_count = per_task.len() as f64;
    let security = security_metrics(&security_inputs)?;

    let summary = Summary {
        avg_bleu: sums[0] / task_count,
        best_bleu: sums[1] / task_count,
        avg_cb: sums[2] / task_count,
        best_cb: sums[3] / task_count,
        com_pass: security.com_pass,
        vul_rate: security.vul_rate,
        safe_aval: security.safe_aval,
        tasks: per_task.len(),
        samples: samples.len(),
        approximate_compile: security.approximate,
    };

    std::fs::create_dir_all(&cfg.output_dir)?;
    write_jsonl(&cfg.artifact(SCORES_FILE), &score_lines)?;
    write_jsonl(&cfg.artifact(FINDINGS_FILE), &finding_lines)?;
    write_json(&cfg.artifact(SECURITY_FILE), &security)?;
    write_json(&cfg.artifact(SUMMARY_FILE), &summary)?;
    Ok(summary)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ForgeError> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    std::fs::write(path, json)?;
    Ok(())
}
