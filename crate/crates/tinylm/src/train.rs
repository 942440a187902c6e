//! Stage training loop. Base weights stay frozen; only the adapter
//! factors B and A move. The default update is plain gradient descent;
//! an adaptive-moment variant sits behind a config switch.

use crate::model::{AdapterPairGrads, AdapterWeights, TinyLm};
use crate::LmError;
use datasetgen::{derive_seed, Stage, TrainingRecord};
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Sgd,
    Adam,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs_ci: usize,
    pub epochs_vd: usize,
    pub epochs_ti: usize,
    pub lora_r: usize,
    pub lora_alpha: f64,
    pub batch_size: usize,
    pub optimizer: Optimizer,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-4,
            epochs_ci: 10,
            epochs_vd: 10,
            epochs_ti: 1,
            lora_r: 4,
            lora_alpha: 32.0,
            batch_size: 8,
            optimizer: Optimizer::Sgd,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), LmError> {
        if self.learning_rate <= 0.0
            || self.lora_r == 0
            || self.lora_alpha <= 0.0
            || self.batch_size == 0
        {
            return Err(LmError::BadConfig(
                "learning_rate, lora_r, lora_alpha, batch_size must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn epochs_for(&self, stage: Stage) -> usize {
        match stage {
            Stage::Ci => self.epochs_ci,
            Stage::Vd => self.epochs_vd,
            Stage::Ti => self.epochs_ti,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochLog {
    pub stage: Stage,
    pub epoch: usize,
    pub mean_loss: f64,
    pub records: usize,
    /// Records whose input had to be left-truncated to fit the context.
    pub truncated: usize,
}

struct AdamState {
    m: Vec<[(Array2<f64>, Array2<f64>); 4]>, // per layer, per projection (b, a)
    v: Vec<[(Array2<f64>, Array2<f64>); 4]>,
    t: usize,
}

impl AdamState {
    fn new(adapters: &AdapterWeights) -> Self {
        let zeros = |layer: &crate::model::LayerAdapters| {
            [
                (
                    Array2::zeros(layer.q.b.raw_dim()),
                    Array2::zeros(layer.q.a.raw_dim()),
                ),
                (
                    Array2::zeros(layer.k.b.raw_dim()),
                    Array2::zeros(layer.k.a.raw_dim()),
                ),
                (
                    Array2::zeros(layer.v.b.raw_dim()),
                    Array2::zeros(layer.v.a.raw_dim()),
                ),
                (
                    Array2::zeros(layer.o.b.raw_dim()),
                    Array2::zeros(layer.o.a.raw_dim()),
                ),
            ]
        };
        Self {
            m: adapters.layers.iter().map(&zeros).collect(),
            v: adapters.layers.iter().map(&zeros).collect(),
            t: 0,
        }
    }
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

fn apply_update(
    adapters: &mut AdapterWeights,
    grads: &[crate::model::LayerAdapterGrads],
    lr: f64,
    adam: &mut Option<AdamState>,
) {
    if let Some(state) = adam {
        state.t += 1;
        let t = state.t as i32;
        for (li, layer_grads) in grads.iter().enumerate() {
            let layer = &mut adapters.layers[li];
            let pairs: [(&mut crate::model::AdapterPair, &AdapterPairGrads, usize); 4] = [
                (&mut layer.q, &layer_grads.q, 0),
                (&mut layer.k, &layer_grads.k, 1),
                (&mut layer.v, &layer_grads.v, 2),
                (&mut layer.o, &layer_grads.o, 3),
            ];
            for (pair, pg, pi) in pairs {
                let (mb, ma) = {
                    let slot = &mut state.m[li][pi];
                    (&mut slot.0, &mut slot.1)
                };
                let (vb, va) = {
                    let slot = &mut state.v[li][pi];
                    (&mut slot.0, &mut slot.1)
                };
                for (param, grad, m, v) in
                    [(&mut pair.b, &pg.b, mb, vb), (&mut pair.a, &pg.a, ma, va)]
                {
                    *m *= ADAM_BETA1;
                    *m += &(grad * (1.0 - ADAM_BETA1));
                    *v *= ADAM_BETA2;
                    *v += &(grad.mapv(|g| g * g) * (1.0 - ADAM_BETA2));
                    let mhat = &*m / (1.0 - ADAM_BETA1.powi(t));
                    let vhat = &*v / (1.0 - ADAM_BETA2.powi(t));
                    let step = mhat / (vhat.mapv(f64::sqrt) + ADAM_EPS) * lr;
                    *param -= &step;
                }
            }
        }
    } else {
        for (li, layer_grads) in grads.iter().enumerate() {
            let layer = &mut adapters.layers[li];
            layer.q.b -= &(&layer_grads.q.b * lr);
            layer.q.a -= &(&layer_grads.q.a * lr);
            layer.k.b -= &(&layer_grads.k.b * lr);
            layer.k.a -= &(&layer_grads.k.a * lr);
            layer.v.b -= &(&layer_grads.v.b * lr);
            layer.v.a -= &(&layer_grads.v.a * lr);
            layer.o.b -= &(&layer_grads.o.b * lr);
            layer.o.a -= &(&layer_grads.o.a * lr);
        }
    }
}

/// Train the adapters for one stage. The incoming adapters are the
/// previous stage's output, giving the chained lineage; pass fresh
/// adapters instead to ablate a stage in isolation.
pub fn train_stage(
    model: &TinyLm,
    adapters: &AdapterWeights,
    dataset: &[TrainingRecord],
    cfg: &TrainConfig,
    stage: Stage,
) -> Result<(AdapterWeights, Vec<EpochLog>), LmError> {
    cfg.validate()?;
    for record in dataset {
        if record.stage != stage {
            return Err(LmError::StageMismatch {
                expected: stage,
                found: record.stage,
                record_id: record.source_id.clone(),
            });
        }
    }
    let mut adapters = adapters.clone();
    let mut logs = Vec::new();
    let epochs = cfg.epochs_for(stage);
    let mut adam = match cfg.optimizer {
        Optimizer::Adam => Some(AdamState::new(&adapters)),
        Optimizer::Sgd => None,
    };
    // Encode once; the rendering is adapter-independent.
    let encoded: Vec<_> = dataset
        .iter()
        .map(|r| model.encode_example(&r.input_text, &r.target_text))
        .collect::<Result<_, _>>()?;
    for epoch in 0..epochs {
        let mut order: Vec<usize> = (0..dataset.len()).collect();
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, stage.as_str(), epoch as u64));
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut truncated = 0usize;
        for batch in order.chunks(cfg.batch_size) {
            let mut batch_grads: Option<Vec<crate::model::LayerAdapterGrads>> = None;
            for &idx in batch {
                let ex = &encoded[idx];
                truncated += usize::from(ex.truncated > 0);
                let (loss, grads) = model.loss_and_grads(Some(&adapters), ex)?;
                if !loss.is_finite() {
                    return Err(LmError::NonFiniteLoss {
                        record_id: dataset[idx].source_id.clone(),
                    });
                }
                loss_sum += loss;
                batch_grads = Some(match batch_grads {
                    None => grads.adapters,
                    Some(mut acc) => {
                        for (a, g) in acc.iter_mut().zip(grads.adapters) {
                            a.q.b += &g.q.b;
                            a.q.a += &g.q.a;
                            a.k.b += &g.k.b;
                            a.k.a += &g.k.a;
                            a.v.b += &g.v.b;
                            a.v.a += &g.v.a;
                            a.o.b += &g.o.b;
                            a.o.a += &g.o.a;
                        }
                        acc
                    }
                });
            }
            if let Some(grads) = batch_grads {
                apply_update(&mut adapters, &grads, cfg.learning_rate, &mut adam);
            }
        }
        logs.push(EpochLog {
            stage,
            epoch,
            mean_loss: loss_sum / dataset.len().max(1) as f64,
            records: dataset.len(),
            truncated,
        });
    }
    adapters.lineage.push(stage);
    Ok((adapters, logs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TinyLmConfig;
    use crate::tokenizer::BpeTokenizer;
    use datasetgen::Tag;

    fn toy_model() -> TinyLm {
        let tokenizer = BpeTokenizer::byte_level();
        let cfg = TinyLmConfig {
            vocab_size: tokenizer.vocab_size(),
            embed_dim: 16,
            num_layers: 1,
            num_heads: 2,
            context_len: 48,
            seed: 42,
        };
        TinyLm::new(cfg, tokenizer).unwrap()
    }

    fn record(stage: Stage, input: &str, target: &str) -> TrainingRecord {
        TrainingRecord {
            stage,
            input_text: input.to_string(),
            target_text: target.to_string(),
            tag: Tag::None,
            source_id: format!("{input}->{target}"),
        }
    }

    #[test]
    fn zero_epochs_leaves_adapters_unchanged() {
        let model = toy_model();
        let adapters = AdapterWeights::init(&model.cfg, 2, 32.0, 1).unwrap();
        let cfg = TrainConfig {
            epochs_ci: 0,
            ..TrainConfig::default()
        };
        let data = vec![record(Stage::Ci, "ab", "cd")];
        let (out, logs) = train_stage(&model, &adapters, &data, &cfg, Stage::Ci).unwrap();
        assert!(logs.is_empty());
        for (before, after) in adapters.layers.iter().zip(&out.layers) {
            assert_eq!(before.q.b, after.q.b);
            assert_eq!(before.q.a, after.q.a);
        }
        // The stage still lands in the lineage.
        assert_eq!(out.lineage, vec![Stage::Ci]);
    }

    #[test]
    fn stage_mismatch_is_rejected() {
        let model = toy_model();
        let adapters = AdapterWeights::init(&model.cfg, 2, 32.0, 1).unwrap();
        let data = vec![record(Stage::Vd, "ab", "cd")];
        assert!(matches!(
            train_stage(&model, &adapters, &data, &TrainConfig::default(), Stage::Ci),
            Err(LmError::StageMismatch { .. })
        ));
    }

    #[test]
    fn training_reduces_loss_on_memorizable_data() {
        let model = toy_model();
        let adapters = AdapterWeights::init(&model.cfg, 4, 32.0, 7).unwrap();
        let data: Vec<_> = ["xy", "yz", "zx"]
            .iter()
            .map(|s| record(Stage::Ci, s, "qq"))
            .collect();
        let cfg = TrainConfig {
            learning_rate: 0.02,
            epochs_ci: 200,
            batch_size: 3,
            optimizer: Optimizer::Adam,
            seed: 5,
            ..TrainConfig::default()
        };
        let (_, logs) = train_stage(&model, &adapters, &data, &cfg, Stage::Ci).unwrap();
        let first = logs.first().unwrap().mean_loss;
        let last = logs.last().unwrap().mean_loss;
        assert!(last < 0.5 * first, "{first} -> {last}");
    }

    #[test]
    fn adam_variant_also_reduces_loss() {
        let model = toy_model();
        let adapters = AdapterWeights::init(&model.cfg, 4, 32.0, 7).unwrap();
        let data = vec![record(Stage::Ci, "ab", "cd")];
        let cfg = TrainConfig {
            learning_rate: 0.01,
            epochs_ci: 20,
            optimizer: Optimizer::Adam,
            ..TrainConfig::default()
        };
        let (_, logs) = train_stage(&model, &adapters, &data, &cfg, Stage::Ci).unwrap();
        assert!(logs.last().unwrap().mean_loss < logs.first().unwrap().mean_loss);
    }

    #[test]
    fn fixed_seed_training_is_deterministic() {
        let model = toy_model();
        let adapters = AdapterWeights::init(&model.cfg, 2, 32.0, 3).unwrap();
        let data: Vec<_> = (0..5)
            .map(|i| record(Stage::Ci, &format!("in{i}"), "out"))
            .collect();
        let cfg = TrainConfig {
            epochs_ci: 2,
            ..TrainConfig::default()
        };
        let (a, la) = train_stage(&model, &adapters, &data, &cfg, Stage::Ci).unwrap();
        let (b, lb) = train_stage(&model, &adapters, &data, &cfg, Stage::Ci).unwrap();
        assert_eq!(a.layers[0].q.b, b.layers[0].q.b);
        assert_eq!(
            la.iter().map(|l| l.mean_loss.to_bits()).collect::<Vec<_>>(),
            lb.iter().map(|l| l.mean_loss.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn base_weights_are_frozen() {
        let model = toy_model();
        let snapshot = model.layers[0].wq.clone();
        let adapters = AdapterWeights::init(&model.cfg, 2, 32.0, 3).unwrap();
        let data = vec![record(Stage::Ci, "ab", "cd")];
        let cfg = TrainConfig {
            epochs_ci: 3,
            learning_rate: 0.1,
            ..TrainConfig::default()
        };
        let (out, _) = train_stage(&model, &adapters, &data, &cfg, Stage::Ci).unwrap();
        assert_eq!(model.layers[0].wq, snapshot);
        // And the adapters did move.
        assert_ne!(out.layers[0].q.b, adapters.layers[0].q.b);
    }
}
