//! The decoder-only transformer and its low-rank adapters. Everything is
//! f64 ndarray on CPU with hand-written backward passes; training code
//! only ever updates the adapter factors, but gradients for the base
//! weights are computed too so they can be checked against finite
//! differences.

use crate::tokenizer::{BpeTokenizer, EOT};
use crate::LmError;
use datasetgen::Stage;
use ndarray::{s, Array1, Array2, Axis};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const LN_EPS: f64 = 1e-5;
const INIT_STD: f64 = 0.02;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TinyLmConfig {
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub num_layers: usize,
    pub num_heads: usize,
    pub context_len: usize,
    pub seed: u64,
}

impl TinyLmConfig {
    pub fn validate(&self) -> Result<(), LmError> {
        if self.vocab_size == 0
            || self.embed_dim == 0
            || self.num_layers == 0
            || self.num_heads == 0
            || self.context_len == 0
        {
            return Err(LmError::BadConfig("all dimensions must be positive".into()));
        }
        if self.embed_dim % self.num_heads != 0 {
            return Err(LmError::BadConfig(format!(
                "embed_dim {} not divisible by num_heads {}",
                self.embed_dim, self.num_heads
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LayerNorm {
    pub g: Array1<f64>,
    pub b: Array1<f64>,
}

impl LayerNorm {
    fn new(dim: usize) -> Self {
        Self {
            g: Array1::ones(dim),
            b: Array1::zeros(dim),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LayerParams {
    pub ln1: LayerNorm,
    pub wq: Array2<f64>,
    pub wk: Array2<f64>,
    pub wv: Array2<f64>,
    pub wo: Array2<f64>,
    pub ln2: LayerNorm,
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
}

#[derive(Debug, Clone)]
pub struct TinyLm {
    pub cfg: TinyLmConfig,
    pub tokenizer: BpeTokenizer,
    pub embed: Array2<f64>,
    pub pos: Array2<f64>,
    pub layers: Vec<LayerParams>,
    pub ln_f: LayerNorm,
    pub head: Array2<f64>,
}

fn randn(rng: &mut ChaCha8Rng, rows: usize, cols: usize, std: f64) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| {
        // Box-Muller from two uniform draws.
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen::<f64>();
        std * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    })
}

impl TinyLm {
    pub fn new(cfg: TinyLmConfig, tokenizer: BpeTokenizer) -> Result<Self, LmError> {
        cfg.validate()?;
        if cfg.vocab_size != tokenizer.vocab_size() {
            return Err(LmError::BadConfig(format!(
                "config vocab {} != tokenizer vocab {}",
                cfg.vocab_size,
                tokenizer.vocab_size()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let d = cfg.embed_dim;
        let hidden = 4 * d;
        // Projections use 1/sqrt(fan_in) so logit magnitudes stay O(1) at
        // any width; a flat small std would cap the head's logit range and
        // with it how confident the frozen base can ever become.
        let proj = 1.0 / (d as f64).sqrt();
        let layers = (0..cfg.num_layers)
            .map(|_| LayerParams {
                ln1: LayerNorm::new(d),
                wq: randn(&mut rng, d, d, proj),
                wk: randn(&mut rng, d, d, proj),
                wv: randn(&mut rng, d, d, proj),
                wo: randn(&mut rng, d, d, proj),
                ln2: LayerNorm::new(d),
                w1: randn(&mut rng, d, hidden, proj),
                b1: Array1::zeros(hidden),
                w2: randn(&mut rng, hidden, d, 1.0 / (hidden as f64).sqrt()),
                b2: Array1::zeros(d),
            })
            .collect();
        Ok(Self {
            embed: randn(&mut rng, cfg.vocab_size, d, INIT_STD),
            pos: randn(&mut rng, cfg.context_len, d, INIT_STD),
            ln_f: LayerNorm::new(d),
            head: randn(&mut rng, d, cfg.vocab_size, proj),
            layers,
            cfg,
            tokenizer,
        })
    }
}

// ---- adapters ------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AdapterPair {
    /// d×r, zero at init so the adapted model starts identical to base.
    pub b: Array2<f64>,
    /// r×k
    pub a: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct LayerAdapters {
    pub q: AdapterPair,
    pub k: AdapterPair,
    pub v: AdapterPair,
    pub o: AdapterPair,
}

#[derive(Debug, Clone)]
pub struct AdapterWeights {
    pub rank: usize,
    pub alpha: f64,
    pub layers: Vec<LayerAdapters>,
    /// Stages this adapter set has been trained through, in order.
    pub lineage: Vec<Stage>,
}

impl AdapterWeights {
    /// Fresh adapters over all attention projections: B = 0, A random.
    pub fn init(cfg: &TinyLmConfig, rank: usize, alpha: f64, seed: u64) -> Result<Self, LmError> {
        let d = cfg.embed_dim;
        let max_rank = d / 4;
        if rank == 0 || rank > max_rank {
            return Err(LmError::RankTooLarge { rank, max: max_rank });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = |rng: &mut ChaCha8Rng| AdapterPair {
            b: Array2::zeros((d, rank)),
            a: randn(rng, rank, d, INIT_STD),
        };
        let layers = (0..cfg.num_layers)
            .map(|_| LayerAdapters {
                q: pair(&mut rng),
                k: pair(&mut rng),
                v: pair(&mut rng),
                o: pair(&mut rng),
            })
            .collect();
        Ok(Self {
            rank,
            alpha,
            layers,
            lineage: Vec::new(),
        })
    }

    pub fn scale(&self) -> f64 {
        self.alpha / self.rank as f64
    }

    /// W0 + (alpha/r)·B·A
    pub fn effective(&self, base: &Array2<f64>, pair: &AdapterPair) -> Array2<f64> {
        base + &(pair.b.dot(&pair.a) * self.scale())
    }
}

// ---- forward -------------------------------------------------------------

fn softmax_rows(x: &Array2<f64>) -> Array2<f64> {
    let mut out = x.clone();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

fn layernorm_fwd(x: &Array2<f64>, ln: &LayerNorm) -> (Array2<f64>, Array2<f64>, Array1<f64>) {
    let d = x.ncols() as f64;
    let mean = x.mean_axis(Axis(1)).unwrap();
    let mut xhat = x.clone();
    for (mut row, &m) in xhat.rows_mut().into_iter().zip(mean.iter()) {
        row.mapv_inplace(|v| v - m);
    }
    let inv_std = xhat
        .rows()
        .into_iter()
        .map(|row| 1.0 / (row.mapv(|v| v * v).sum() / d + LN_EPS).sqrt())
        .collect::<Array1<f64>>();
    for (mut row, &is) in xhat.rows_mut().into_iter().zip(inv_std.iter()) {
        row.mapv_inplace(|v| v * is);
    }
    let y = &xhat * &ln.g + &ln.b;
    (y, xhat, inv_std)
}

fn layernorm_bwd(
    dy: &Array2<f64>,
    xhat: &Array2<f64>,
    inv_std: &Array1<f64>,
    ln: &LayerNorm,
    dg: &mut Array1<f64>,
    db: &mut Array1<f64>,
) -> Array2<f64> {
    let d = dy.ncols() as f64;
    *dg += &(dy * xhat).sum_axis(Axis(0));
    *db += &dy.sum_axis(Axis(0));
    let dxhat = dy * &ln.g;
    let mean_dxhat = dxhat.mean_axis(Axis(1)).unwrap();
    let mean_dxhat_xhat = (&dxhat * xhat).sum_axis(Axis(1)) / d;
    let mut dx = dxhat;
    for (i, mut row) in dx.rows_mut().into_iter().enumerate() {
        let xr = xhat.row(i);
        let a = mean_dxhat[i];
        let b = mean_dxhat_xhat[i];
        for (j, v) in row.iter_mut().enumerate() {
            *v = inv_std[i] * (*v - a - xr[j] * b);
        }
    }
    dx
}

struct LayerCache {
    ln1_xhat: Array2<f64>,
    ln1_inv_std: Array1<f64>,
    a: Array2<f64>,
    weff: [Array2<f64>; 4], // q, k, v, o
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    att: Vec<Array2<f64>>, // per head, T×T
    z: Array2<f64>,
    ln2_xhat: Array2<f64>,
    ln2_inv_std: Array1<f64>,
    b: Array2<f64>,
    m1: Array2<f64>,
    act: Array2<f64>,
}

pub(crate) struct ForwardCache {
    tokens: Vec<u32>,
    x0: Array2<f64>,
    layers: Vec<LayerCache>,
    lnf_xhat: Array2<f64>,
    lnf_inv_std: Array1<f64>,
    f: Array2<f64>,
    pub logits: Array2<f64>,
}

impl TinyLm {
    pub(crate) fn forward_cache(
        &self,
        adapters: Option<&AdapterWeights>,
        tokens: &[u32],
    ) -> Result<ForwardCache, LmError> {
        let t = tokens.len();
        if t == 0 || t > self.cfg.context_len {
            return Err(LmError::SequenceTooLong {
                len: t,
                context: self.cfg.context_len,
            });
        }
        let d = self.cfg.embed_dim;
        let heads = self.cfg.num_heads;
        let dh = d / heads;
        let mut x = Array2::zeros((t, d));
        for (i, &tok) in tokens.iter().enumerate() {
            let row = &self.embed.row(tok as usize) + &self.pos.row(i);
            x.row_mut(i).assign(&row);
        }
        let x0 = x.clone();
        let mut layer_caches = Vec::with_capacity(self.layers.len());
        for (li, layer) in self.layers.iter().enumerate() {
            let x_in = x.clone();
            let (a, ln1_xhat, ln1_inv_std) = layernorm_fwd(&x, &layer.ln1);
            let weff = match adapters {
                Some(ad) => {
                    let la = &ad.layers[li];
                    [
                        ad.effective(&layer.wq, &la.q),
                        ad.effective(&layer.wk, &la.k),
                        ad.effective(&layer.wv, &la.v),
                        ad.effective(&layer.wo, &la.o),
                    ]
                }
                None => [
                    layer.wq.clone(),
                    layer.wk.clone(),
                    layer.wv.clone(),
                    layer.wo.clone(),
                ],
            };
            let q = a.dot(&weff[0]);
            let k = a.dot(&weff[1]);
            let v = a.dot(&weff[2]);
            let mut z = Array2::zeros((t, d));
            let mut att = Vec::with_capacity(heads);
            for h in 0..heads {
                let cols = s![.., h * dh..(h + 1) * dh];
                let qh = q.slice(cols);
                let kh = k.slice(cols);
                let vh = v.slice(cols);
                let mut scores = qh.dot(&kh.t()) / (dh as f64).sqrt();
                for i in 0..t {
                    for j in (i + 1)..t {
                        scores[(i, j)] = f64::NEG_INFINITY;
                    }
                }
                let p = softmax_rows(&scores);
                z.slice_mut(cols).assign(&p.dot(&vh));
                att.push(p);
            }
            let attn_out = z.dot(&weff[3]);
            let x_mid = &x_in + &attn_out;
            let (b, ln2_xhat, ln2_inv_std) = layernorm_fwd(&x_mid, &layer.ln2);
            let m1 = b.dot(&layer.w1) + &layer.b1;
            let act = m1.mapv(|v| v.max(0.0));
            let mlp_out = act.dot(&layer.w2) + &layer.b2;
            x = &x_mid + &mlp_out;
            layer_caches.push(LayerCache {
                ln1_xhat,
                ln1_inv_std,
                a,
                weff,
                q,
                k,
                v,
                att,
                z,
                ln2_xhat,
                ln2_inv_std,
                b,
                m1,
                act,
            });
        }
        let (f, lnf_xhat, lnf_inv_std) = layernorm_fwd(&x, &self.ln_f);
        let logits = f.dot(&self.head);
        Ok(ForwardCache {
            tokens: tokens.to_vec(),
            x0,
            layers: layer_caches,
            lnf_xhat,
            lnf_inv_std,
            f,
            logits,
        })
    }

    /// Per-position next-token distributions (rows sum to 1).
    pub fn forward(
        &self,
        adapters: Option<&AdapterWeights>,
        tokens: &[u32],
    ) -> Result<Array2<f64>, LmError> {
        Ok(softmax_rows(&self.forward_cache(adapters, tokens)?.logits))
    }
}

// ---- gradients -----------------------------------------------------------

#[derive(Debug, Clone)]
pub struct LayerGrads {
    pub ln1_g: Array1<f64>,
    pub ln1_b: Array1<f64>,
    pub wq: Array2<f64>,
    pub wk: Array2<f64>,
    pub wv: Array2<f64>,
    pub wo: Array2<f64>,
    pub ln2_g: Array1<f64>,
    pub ln2_b: Array1<f64>,
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
}

#[derive(Debug, Clone)]
pub struct AdapterPairGrads {
    pub b: Array2<f64>,
    pub a: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct LayerAdapterGrads {
    pub q: AdapterPairGrads,
    pub k: AdapterPairGrads,
    pub v: AdapterPairGrads,
    pub o: AdapterPairGrads,
}

#[derive(Debug, Clone)]
pub struct Grads {
    pub embed: Array2<f64>,
    pub pos: Array2<f64>,
    pub head: Array2<f64>,
    pub lnf_g: Array1<f64>,
    pub lnf_b: Array1<f64>,
    pub layers: Vec<LayerGrads>,
    /// Empty when the forward pass ran without adapters.
    pub adapters: Vec<LayerAdapterGrads>,
}

impl TinyLm {
    /// Backward pass from d(loss)/d(logits). Base-weight gradients are
    /// always filled; adapter gradients when `adapters` is given.
    pub(crate) fn backward(
        &self,
        adapters: Option<&AdapterWeights>,
        cache: &ForwardCache,
        dlogits: &Array2<f64>,
    ) -> Grads {
        let d = self.cfg.embed_dim;
        let heads = self.cfg.num_heads;
        let dh = d / heads;
        let t = cache.tokens.len();

        let dhead = cache.f.t().dot(dlogits);
        let df = dlogits.dot(&self.head.t());
        let mut lnf_g = Array1::zeros(d);
        let mut lnf_b = Array1::zeros(d);
        let mut dx = layernorm_bwd(
            &df,
            &cache.lnf_xhat,
            &cache.lnf_inv_std,
            &self.ln_f,
            &mut lnf_g,
            &mut lnf_b,
        );

        let mut layer_grads: Vec<LayerGrads> = Vec::with_capacity(self.layers.len());
        let mut adapter_grads: Vec<LayerAdapterGrads> = Vec::new();
        for (li, layer) in self.layers.iter().enumerate().rev() {
            let cache_l = &cache.layers[li];
            // MLP
            let dact = dx.dot(&layer.w2.t());
            let dw2 = cache_l.act.t().dot(&dx);
            let db2 = dx.sum_axis(Axis(0));
            let dm1 = &dact * &cache_l.m1.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
            let dw1 = cache_l.b.t().dot(&dm1);
            let db1 = dm1.sum_axis(Axis(0));
            let db_in = dm1.dot(&layer.w1.t());
            let mut ln2_g = Array1::zeros(d);
            let mut ln2_b = Array1::zeros(d);
            let dx_mid_from_ln = layernorm_bwd(
                &db_in,
                &cache_l.ln2_xhat,
                &cache_l.ln2_inv_std,
                &layer.ln2,
                &mut ln2_g,
                &mut ln2_b,
            );
            let dx_mid = &dx + &dx_mid_from_ln;

            // Attention output projection
            let dattn_out = dx_mid.clone();
            let dwo_eff = cache_l.z.t().dot(&dattn_out);
            let dz = dattn_out.dot(&cache_l.weff[3].t());

            // Heads
            let mut dq = Array2::zeros((t, d));
            let mut dk = Array2::zeros((t, d));
            let mut dv = Array2::zeros((t, d));
            for h in 0..heads {
                let cols = s![.., h * dh..(h + 1) * dh];
                let p = &cache_l.att[h];
                let vh = cache_l.v.slice(cols);
                let dzh = dz.slice(cols);
                let dp = dzh.dot(&vh.t());
                let dvh = p.t().dot(&dzh);
                // softmax backward per row
                let rowdot = (&dp * p).sum_axis(Axis(1));
                let mut ds = &dp * p;
                for (i, mut row) in ds.rows_mut().into_iter().enumerate() {
                    let c = rowdot[i];
                    for (j, val) in row.iter_mut().enumerate() {
                        *val -= p[(i, j)] * c;
                    }
                }
                ds /= (dh as f64).sqrt();
                let qh = cache_l.q.slice(cols);
                let kh = cache_l.k.slice(cols);
                dq.slice_mut(cols).assign(&ds.dot(&kh));
                dk.slice_mut(cols).assign(&ds.t().dot(&qh));
                dv.slice_mut(cols).assign(&dvh);
            }
            let a_t = cache_l.a.t();
            let dwq_eff = a_t.dot(&dq);
            let dwk_eff = a_t.dot(&dk);
            let dwv_eff = a_t.dot(&dv);
            let da = dq.dot(&cache_l.weff[0].t())
                + dk.dot(&cache_l.weff[1].t())
                + dv.dot(&cache_l.weff[2].t());
            let mut ln1_g = Array1::zeros(d);
            let mut ln1_b = Array1::zeros(d);
            let dx_from_ln1 = layernorm_bwd(
                &da,
                &cache_l.ln1_xhat,
                &cache_l.ln1_inv_std,
                &layer.ln1,
                &mut ln1_g,
                &mut ln1_b,
            );
            dx = &dx_mid + &dx_from_ln1;

            if let Some(ad) = adapters {
                let la = &ad.layers[li];
                let scale = ad.scale();
                let pair_grads = |pair: &AdapterPair, dweff: &Array2<f64>| AdapterPairGrads {
                    b: dweff.dot(&pair.a.t()) * scale,
                    a: pair.b.t().dot(dweff) * scale,
                };
                adapter_grads.push(LayerAdapterGrads {
                    q: pair_grads(&la.q, &dwq_eff),
                    k: pair_grads(&la.k, &dwk_eff),
                    v: pair_grads(&la.v, &dwv_eff),
                    o: pair_grads(&la.o, &dwo_eff),
                });
            }
            layer_grads.push(LayerGrads {
                ln1_g,
                ln1_b,
                wq: dwq_eff,
                wk: dwk_eff,
                wv: dwv_eff,
                wo: dwo_eff,
                ln2_g,
                ln2_b,
                w1: dw1,
                b1: db1,
                w2: dw2,
                b2: db2,
            });
        }
        layer_grads.reverse();
        adapter_grads.reverse();

        let mut dembed = Array2::zeros(self.embed.raw_dim());
        let mut dpos = Array2::zeros(self.pos.raw_dim());
        for (i, &tok) in cache.tokens.iter().enumerate() {
            let row = dx.row(i);
            let mut e = dembed.row_mut(tok as usize);
            e += &row;
            let mut p = dpos.row_mut(i);
            p += &row;
        }
        let _ = &cache.x0;
        Grads {
            embed: dembed,
            pos: dpos,
            head: dhead,
            lnf_g,
            lnf_b,
            layers: layer_grads,
            adapters: adapter_grads,
        }
    }
}

// ---- masked loss ---------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EncodedExample {
    /// `<EOT>` + (possibly left-truncated) input tokens + target tokens + `<EOT>`.
    pub tokens: Vec<u32>,
    /// Index of the first target token inside `tokens`.
    pub target_start: usize,
    /// Number of input tokens dropped from the left to fit the context.
    pub truncated: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct MaskedLoss {
    pub loss: f64,
    pub truncated: usize,
}

impl TinyLm {
    /// Render input+target into one sequence. The input may be truncated
    /// from the left to fit the context window; the target never is.
    pub fn encode_example(
        &self,
        input_text: &str,
        target_text: &str,
    ) -> Result<EncodedExample, LmError> {
        let mut input = vec![EOT];
        input.extend(self.tokenizer.encode(input_text));
        let mut target = self.tokenizer.encode(target_text);
        target.push(EOT);
        if target.len() + 1 > self.cfg.context_len {
            return Err(LmError::TargetTruncated {
                len: target.len(),
                context: self.cfg.context_len,
            });
        }
        let total = input.len() + target.len();
        let truncated = total.saturating_sub(self.cfg.context_len);
        let input = &input[truncated..];
        let mut tokens = input.to_vec();
        let target_start = tokens.len();
        tokens.extend(target);
        Ok(EncodedExample {
            tokens,
            target_start,
            truncated,
        })
    }

    /// Sum of −log p over target positions only; input positions
    /// contribute nothing. One operation serves all three stages.
    pub fn masked_nll(
        &self,
        adapters: Option<&AdapterWeights>,
        input_text: &str,
        target_text: &str,
    ) -> Result<MaskedLoss, LmError> {
        let ex = self.encode_example(input_text, target_text)?;
        let cache = self.forward_cache(adapters, &ex.tokens)?;
        Ok(MaskedLoss {
            loss: nll_from_logits(&cache.logits, &ex.tokens, ex.target_start),
            truncated: ex.truncated,
        })
    }

    /// Loss plus gradients for a prepared example. Gradients cover every
    /// parameter group — adapters and base weights — so correctness can
    /// be checked even for the groups training leaves frozen.
    pub fn loss_and_grads(
        &self,
        adapters: Option<&AdapterWeights>,
        ex: &EncodedExample,
    ) -> Result<(f64, Grads), LmError> {
        let cache = self.forward_cache(adapters, &ex.tokens)?;
        let probs = softmax_rows(&cache.logits);
        let loss = nll_from_logits(&cache.logits, &ex.tokens, ex.target_start);
        let mut dlogits = Array2::zeros(cache.logits.raw_dim());
        for j in ex.target_start..ex.tokens.len() {
            let i = j - 1;
            let mut row = dlogits.row_mut(i);
            row.assign(&probs.row(i));
            row[ex.tokens[j] as usize] -= 1.0;
        }
        Ok((loss, self.backward(adapters, &cache, &dlogits)))
    }
}

pub(crate) fn nll_from_logits(logits: &Array2<f64>, tokens: &[u32], target_start: usize) -> f64 {
    let probs = softmax_rows(logits);
    let mut loss = 0.0;
    for j in target_start..tokens.len() {
        loss -= probs[(j - 1, tokens[j] as usize)].max(f64::MIN_POSITIVE).ln();
    }
    loss
}
