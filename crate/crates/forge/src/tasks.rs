//! Tasks and samples file i/o. A task is one natural-language instruction
//! with its reference contract; samples are the generated candidates,
//! `samples_per_task` lines per task.

use crate::ForgeError;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Task {
    pub task_id: String,
    pub instruction: String,
    pub reference_code: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sample {
    pub task_id: String,
    pub sample_index: usize,
    pub code: String,
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, ForgeError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut items = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(serde_json::from_str(&line).map_err(|e| {
            ForgeError::Other(format!("{}:{}: {e}", path.display(), lineno + 1))
        })?);
    }
    Ok(items)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), ForgeError> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_tasks(path: &Path) -> Result<Vec<Task>, ForgeError> {
    let tasks: Vec<Task> = read_jsonl(path)?;
    if tasks.is_empty() {
        return Err(ForgeError::Config(format!(
            "no tasks in {}",
            path.display()
        )));
    }
    Ok(tasks)
}

pub fn read_samples(path: &Path) -> Result<Vec<Sample>, ForgeError> {
    read_jsonl(path)
}
