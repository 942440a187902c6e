//! Autoregressive sampling: logits / temperature → softmax → nucleus
//! truncation at top_p → renormalize → draw. Deterministic under seed;
//! numerically degenerate distributions fall back to plain argmax.

use crate::model::{AdapterWeights, TinyLm};
use crate::tokenizer::EOT;
use crate::LmError;
use datasetgen::{Stage, TAG_SECURITY, TI_PROMPT};
use ndarray::Array1;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub temperature: f64,
    pub top_p: f64,
    pub max_new_tokens: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            temperature: 0.2,
            top_p: 0.95,
            max_new_tokens: 256,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), LmError> {
        if self.temperature <= 0.0 {
            return Err(LmError::BadSampler(format!(
                "temperature must be > 0, got {}",
                self.temperature
            )));
        }
        if self.top_p <= 0.0 || self.top_p > 1.0 {
            return Err(LmError::BadSampler(format!(
                "top_p must be in (0, 1], got {}",
                self.top_p
            )));
        }
        Ok(())
    }
}

/// Truncate a distribution to the smallest prefix of descending-probability
/// tokens whose cumulative mass reaches `top_p`, renormalized. Returns
/// (token, probability) pairs; exposed for direct arithmetic tests.
pub fn nucleus(probs: &Array1<f64>, top_p: f64) -> Vec<(usize, f64)> {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| {
        probs[b]
            .partial_cmp(&probs[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut kept = Vec::new();
    let mut mass = 0.0;
    for &idx in &order {
        kept.push((idx, probs[idx]));
        mass += probs[idx];
        if mass >= top_p {
            break;
        }
    }
    if mass <= 0.0 {
        return Vec::new();
    }
    for (_, p) in &mut kept {
        *p /= mass;
    }
    kept
}

fn argmax(values: &Array1<f64>) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn next_token(logits: &Array1<f64>, cfg: &SamplerConfig, rng: &mut ChaCha8Rng) -> usize {
    let scaled = logits / cfg.temperature;
    let max = scaled.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    if !max.is_finite() {
        return argmax(logits);
    }
    let exp = scaled.mapv(|v| (v - max).exp());
    let sum = exp.sum();
    if !sum.is_finite() || sum <= 0.0 {
        return argmax(logits);
    }
    let probs = exp / sum;
    let kept = nucleus(&probs, cfg.top_p);
    if kept.is_empty() {
        return argmax(logits);
    }
    let draw: f64 = rng.gen();
    let mut acc = 0.0;
    for &(idx, p) in &kept {
        acc += p;
        if draw < acc {
            return idx;
        }
    }
    kept.last().unwrap().0
}

/// Generate text after `prompt`, stopping at end-of-text or
/// `max_new_tokens`. The returned string excludes the prompt.
pub fn sample(
    model: &TinyLm,
    adapters: Option<&AdapterWeights>,
    prompt: &str,
    cfg: &SamplerConfig,
) -> Result<String, LmError> {
    cfg.validate()?;
    let mut tokens = vec![EOT];
    tokens.extend(model.tokenizer.encode(prompt));
    if tokens.len() > model.cfg.context_len {
        return Err(LmError::SequenceTooLong {
            len: tokens.len(),
            context: model.cfg.context_len,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut generated = Vec::new();
    for _ in 0..cfg.max_new_tokens {
        let window = if tokens.len() > model.cfg.context_len {
            &tokens[tokens.len() - model.cfg.context_len..]
        } else {
            &tokens[..]
        };
        let cache = model.forward_cache(adapters, window)?;
        let logits = cache.logits.row(cache.logits.nrows() - 1).to_owned();
        let tok = next_token(&logits, cfg, &mut rng) as u32;
        if tok == EOT {
            break;
        }
        tokens.push(tok);
        generated.push(tok);
    }
    Ok(model.tokenizer.decode(&generated))
}

/// Build the instruction prompt with the security tag appended and sample
/// from it. Requires adapters trained through the instruction stage.
pub fn generate_secure(
    model: &TinyLm,
    adapters: &AdapterWeights,
    instruction: &str,
    cfg: &SamplerConfig,
) -> Result<String, LmError> {
    if !adapters.lineage.contains(&Stage::Ti) {
        return Err(LmError::NotTrained);
    }
    let prompt = secure_prompt(instruction);
    sample(model, Some(adapters), &prompt, cfg)
}

/// instruction + newline + code request + newline + security tag.
pub fn secure_prompt(instruction: &str) -> String {
    format!("{instruction}\n{TI_PROMPT}\n{TAG_SECURITY}")
}
