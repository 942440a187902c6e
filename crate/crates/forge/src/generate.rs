//! Tag-conditioned generation: `samples_per_task` samples per task from
//! the final-stage checkpoint, each with its own seed derived from
//! (config seed, task id, sample index) so ordering cannot matter.

use crate::config::PipelineConfig;
use crate::tasks::{read_tasks, write_jsonl, Sample};
use crate::train::checkpoint_file;
use crate::ForgeError;
use datasetgen::{derive_seed, Stage};
use tinylm::{generate_secure, load_checkpoint};

pub const SAMPLES_FILE: &str = "samples.jsonl";

/// The last enabled stage, whose checkpoint generation reads.
fn final_stage(cfg: &PipelineConfig) -> Stage {
    if cfg.stages.ti {
        Stage::Ti
    } else if cfg.stages.vd {
        Stage::Vd
    } else {
        Stage::Ci
    }
}

pub fn cmd_generate(cfg: &PipelineConfig) -> Result<Vec<Sample>, ForgeError> {
    cfg.require_input(&cfg.tasks_path, "tasks file")?;
    let tasks = read_tasks(&cfg.tasks_path)?;
    let ckpt_path = cfg.artifact(&checkpoint_file(final_stage(cfg)));
    if !ckpt_path.exists() {
        return Err(ForgeError::Missing(format!(
            "{} (run train first)",
            ckpt_path.display()
        )));
    }
    let ckpt = load_checkpoint(&ckpt_path)?;

    let mut samples = Vec::with_capacity(tasks.len() * cfg.samples_per_task);
    for task in &tasks {
        for index in 0..cfg.samples_per_task {
            let mut sampler = cfg.sampler.clone();
            sampler.seed = derive_seed(cfg.seed, &task.task_id, index as u64);
            // A sample that cannot be generated (e.g. over-long
            // instruction) becomes an empty candidate; evaluation
            // scores it, the run never aborts.
            let code = generate_secure(&ckpt.model, &ckpt.adapters, &task.instruction, &sampler)
                .unwrap_or_default();
            samples.push(Sample {
                task_id: task.task_id.clone(),
                sample_index: index,
                code,
            });
        }
    }
    std::fs::create_dir_all(&cfg.output_dir)?;
    write_jsonl(&cfg.artifact(SAMPLES_FILE), &samples)?;
    Ok(samples)
}
