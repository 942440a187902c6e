//! Versioned binary checkpoint: a JSON header (config, tokenizer merges,
//! adapter shape, stage lineage, training rng seed) followed by every
//! tensor as little-endian f32 in a fixed documented order. Weights are
//! held in f64 in memory; the file quantizes to f32.
//!
//! Layout: magic "TLMC" | version u32 | header-length u64 | header JSON |
//! tensors: embed, pos, per layer (ln1 g/b, wq, wk, wv, wo, ln2 g/b,
//! w1, b1, w2, b2), ln_f g/b, head, then per layer adapter factors
//! (q/k/v/o, each B then A).

use crate::model::{AdapterPair, AdapterWeights, LayerAdapters, LayerParams, TinyLm, TinyLmConfig};
use crate::tokenizer::BpeTokenizer;
use crate::LmError;
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use datasetgen::Stage;
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"TLMC";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    config: TinyLmConfig,
    merges: Vec<(u32, u32)>,
    rank: usize,
    alpha: f64,
    lineage: Vec<Stage>,
    rng_seed: u64,
}

#[derive(Debug)]
pub struct Checkpoint {
    pub model: TinyLm,
    pub adapters: AdapterWeights,
    pub rng_seed: u64,
}

fn write_arr2<W: Write>(w: &mut W, arr: &Array2<f64>) -> std::io::Result<()> {
    for &v in arr.iter() {
        w.write_f32::<LittleEndian>(v as f32)?;
    }
    Ok(())
}

fn write_arr1<W: Write>(w: &mut W, arr: &Array1<f64>) -> std::io::Result<()> {
    for &v in arr.iter() {
        w.write_f32::<LittleEndian>(v as f32)?;
    }
    Ok(())
}

fn read_arr2<R: Read>(r: &mut R, rows: usize, cols: usize) -> Result<Array2<f64>, LmError> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(f64::from(r.read_f32::<LittleEndian>()?));
    }
    Array2::from_shape_vec((rows, cols), data)
        .map_err(|e| LmError::Checkpoint(e.to_string()))
}

fn read_arr1<R: Read>(r: &mut R, len: usize) -> Result<Array1<f64>, LmError> {
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        data.push(f64::from(r.read_f32::<LittleEndian>()?));
    }
    Ok(Array1::from(data))
}

pub fn save_checkpoint(
    path: &Path,
    model: &TinyLm,
    adapters: &AdapterWeights,
    rng_seed: u64,
) -> Result<(), LmError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    let header = Header {
        config: model.cfg.clone(),
        merges: model.tokenizer.merges().to_vec(),
        rank: adapters.rank,
        alpha: adapters.alpha,
        lineage: adapters.lineage.clone(),
        rng_seed,
    };
    let header_json =
        serde_json::to_vec(&header).map_err(|e| LmError::Checkpoint(e.to_string()))?;
    w.write_u64::<LittleEndian>(header_json.len() as u64)?;
    w.write_all(&header_json)?;
    write_arr2(&mut w, &model.embed)?;
    write_arr2(&mut w, &model.pos)?;
    for layer in &model.layers {
        write_arr1(&mut w, &layer.ln1.g)?;
        write_arr1(&mut w, &layer.ln1.b)?;
        write_arr2(&mut w, &layer.wq)?;
        write_arr2(&mut w, &layer.wk)?;
        write_arr2(&mut w, &layer.wv)?;
        write_arr2(&mut w, &layer.wo)?;
        write_arr1(&mut w, &layer.ln2.g)?;
        write_arr1(&mut w, &layer.ln2.b)?;
        write_arr2(&mut w, &layer.w1)?;
        write_arr1(&mut w, &layer.b1)?;
        write_arr2(&mut w, &layer.w2)?;
        write_arr1(&mut w, &layer.b2)?;
    }
    write_arr1(&mut w, &model.ln_f.g)?;
    write_arr1(&mut w, &model.ln_f.b)?;
    write_arr2(&mut w, &model.head)?;
    for layer in &adapters.layers {
        for pair in [&layer.q, &layer.k, &layer.v, &layer.o] {
            write_arr2(&mut w, &pair.b)?;
            write_arr2(&mut w, &pair.a)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, LmError> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(LmError::Checkpoint("bad magic".into()));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(LmError::Checkpoint(format!(
            "unsupported version {version}"
        )));
    }
    let header_len = r.read_u64::<LittleEndian>()? as usize;
    let mut header_json = vec![0u8; header_len];
    r.read_exact(&mut header_json)?;
    let header: Header =
        serde_json::from_slice(&header_json).map_err(|e| LmError::Checkpoint(e.to_string()))?;
    let tokenizer = BpeTokenizer::from_merges(header.merges);
    let cfg = header.config;
    cfg.validate()?;
    if cfg.vocab_size != tokenizer.vocab_size() {
        return Err(LmError::Checkpoint("vocab/tokenizer mismatch".into()));
    }
    let d = cfg.embed_dim;
    let hidden = 4 * d;
    let embed = read_arr2(&mut r, cfg.vocab_size, d)?;
    let pos = read_arr2(&mut r, cfg.context_len, d)?;
    let mut layers = Vec::with_capacity(cfg.num_layers);
    for _ in 0..cfg.num_layers {
        layers.push(LayerParams {
            ln1: crate::model::LayerNorm {
                g: read_arr1(&mut r, d)?,
                b: read_arr1(&mut r, d)?,
            },
            wq: read_arr2(&mut r, d, d)?,
            wk: read_arr2(&mut r, d, d)?,
            wv: read_arr2(&mut r, d, d)?,
            wo: read_arr2(&mut r, d, d)?,
            ln2: crate::model::LayerNorm {
                g: read_arr1(&mut r, d)?,
                b: read_arr1(&mut r, d)?,
            },
            w1: read_arr2(&mut r, d, hidden)?,
            b1: read_arr1(&mut r, hidden)?,
            w2: read_arr2(&mut r, hidden, d)?,
            b2: read_arr1(&mut r, d)?,
        });
    }
    let ln_f = crate::model::LayerNorm {
        g: read_arr1(&mut r, d)?,
        b: read_arr1(&mut r, d)?,
    };
    let head = read_arr2(&mut r, d, cfg.vocab_size)?;
    let mut adapter_layers = Vec::with_capacity(cfg.num_layers);
    for _ in 0..cfg.num_layers {
        let mut pairs = Vec::with_capacity(4);
        for _ in 0..4 {
            pairs.push(AdapterPair {
                b: read_arr2(&mut r, d, header.rank)?,
                a: read_arr2(&mut r, header.rank, d)?,
            });
        }
        let o = pairs.pop().unwrap();
        let v = pairs.pop().unwrap();
        let k = pairs.pop().unwrap();
        let q = pairs.pop().unwrap();
        adapter_layers.push(LayerAdapters { q, k, v, o });
    }
    let model = TinyLm {
        cfg,
        tokenizer,
        embed,
        pos,
        layers,
        ln_f,
        head,
    };
    let adapters = AdapterWeights {
        rank: header.rank,
        alpha: header.alpha,
        layers: adapter_layers,
        lineage: header.lineage,
    };
    Ok(Checkpoint {
        model,
        adapters,
        rng_seed: header.rng_seed,
    })
}
