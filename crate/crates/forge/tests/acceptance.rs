//! The acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see them). Every check
//! rests on an oracle that is independent of the implementation under
//! test: brute-force counters, finite differences, hand-computed values,
//! curated fixtures, or byte comparison across reruns.

mod common;

use common::{is_vulnerable, singular_values, toy_contract, write_corpus, MARKER};
use datasetgen::{
    build_ci_dataset, build_ti_dataset, build_vd_dataset, split_811, write_records, Mode, Stage,
    Tag, TrainingRecord, TAG_SECURITY, TAG_VULNERABLE, TI_PROMPT,
};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solfront::ContractSource;
use std::collections::HashMap;
use tinylm::{
    sample::nucleus, train_stage, AdapterWeights, BpeTokenizer, Optimizer, SamplerConfig, TinyLm,
    TinyLmConfig, TrainConfig, EOT,
};

fn verdict(number: &str, name: &str, errors: &[String]) {
    let pass = errors.is_empty();
    println!(
        "criterion {number} {name}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {number} {name}: {:?}", &errors[..errors.len().min(5)]);
}

// --- criterion 1: BLEU vs a brute-force n-gram counter --------------------

/// Straight-line reimplementation with different data structures: count
/// n-grams by scanning windows into sorted vectors, clip, smooth, take
/// the geometric mean, apply the brevity penalty.
fn bleu_oracle(cand: &[String], refr: &[String], max_n: usize, eps: f64) -> f64 {
    if cand.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let grams = |toks: &[String]| -> Vec<Vec<String>> {
            if toks.len() < n {
                return Vec::new();
            }
            (0..=toks.len() - n).map(|i| toks[i..i + n].to_vec()).collect()
        };
        let cgrams = grams(cand);
        let rgrams = grams(refr);
        let p = if cgrams.is_empty() {
            eps
        } else {
            let mut matched = 0usize;
            let mut used = vec![false; rgrams.len()];
            for g in &cgrams {
                if let Some(slot) = rgrams
                    .iter()
                    .enumerate()
                    .position(|(i, r)| !used[i] && r == g)
                {
                    used[slot] = true;
                    matched += 1;
                }
            }
            (matched as f64).max(eps) / cgrams.len() as f64
        };
        log_sum += p.ln();
    }
    let mean = (log_sum / max_n as f64).exp();
    let bp = (1.0 - refr.len() as f64 / cand.len() as f64).min(0.0).exp();
    bp * mean
}

#[test]
fn criterion_01_bleu_brute_force_oracle() {
    let cfg = codemetrics::MetricConfig::default();
    let alphabet = ["a", "b", "c"];
    let mut sequences: Vec<Vec<String>> = Vec::new();
    for len in 1usize..=6 {
        for mut code in 0..3usize.pow(len as u32) {
            let mut seq = Vec::with_capacity(len);
            for _ in 0..len {
                seq.push(alphabet[code % 3].to_string());
                code /= 3;
            }
            sequences.push(seq);
        }
    }

    let mut errors = Vec::new();
    for cand in &sequences {
        for refr in &sequences {
            let got = codemetrics::bleu(cand, refr, &cfg).unwrap();
            let want = bleu_oracle(cand, refr, cfg.max_n, cfg.smoothing_epsilon);
            if (got - want).abs() > 1e-9 {
                errors.push(format!("{cand:?} vs {refr:?}: {got} != {want}"));
                if errors.len() > 4 {
                    break;
                }
            }
        }
        if errors.len() > 4 {
            break;
        }
    }

    let toks = |s: &str| -> Vec<String> { s.split_whitespace().map(str::to_string).collect() };
    let hand = codemetrics::bleu(&toks("a b a b c"), &toks("a b a b c d e"), &cfg).unwrap();
    if (hand - (-0.4f64).exp()).abs() > 1e-9 {
        errors.push(format!("hand case: {hand} != exp(-0.4)"));
    }
    verdict("01", "bleu-brute-force-oracle", &errors);
}

// --- criterion 2: composite score linearity and bounds --------------------

fn mutate(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut out = text.to_string();
    for _ in 0..rng.gen_range(0..4) {
        match rng.gen_range(0..3) {
            0 => out = out.replace("total", "sum"),
            1 => {
                // Drop a slice of the tail: often leaves broken syntax.
                let cut = rng.gen_range(out.len() / 2..out.len());
                out.truncate(cut);
            }
            _ => out.push_str(" function extra() public { }"),
        }
    }
    out
}

#[test]
fn criterion_02_codebleu_linearity_and_bounds() {
    let cfg = codemetrics::MetricConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut errors = Vec::new();
    for case in 0..1000 {
        let i = rng.gen_range(0..40);
        let reference =
            ContractSource::new(toy_contract(i, is_vulnerable(i)), format!("r{case}")).unwrap();
        let candidate =
            ContractSource::generated(mutate(&toy_contract(rng.gen_range(0..40), false), &mut rng));
        let scores = codemetrics::codebleu(&candidate, &reference, &cfg).unwrap();
        let recombined: f64 = scores
            .components
            .iter()
            .zip(cfg.codebleu_weights.iter())
            .map(|(c, w)| c * w)
            .sum();
        if (scores.cb - recombined).abs() > 1e-9 {
            errors.push(format!("case {case}: cb {} != {recombined}", scores.cb));
        }
        for (k, c) in scores.components.iter().enumerate() {
            if !(0.0..=1.0).contains(c) {
                errors.push(format!("case {case}: component {k} = {c} out of range"));
            }
        }
        if errors.len() > 4 {
            break;
        }
    }
    verdict("02", "codebleu-linearity-and-bounds", &errors);
}

// --- criterion 3: infilling round trip ------------------------------------

#[test]
fn criterion_03_infill_round_trip() {
    let mut errors = Vec::new();
    // Stripped of comments, matching what the dataset builder feeds in.
    let contracts: Vec<ContractSource> = (0..50)
        .map(|i| {
            let raw =
                ContractSource::new(toy_contract(i, is_vulnerable(i)), format!("c{i}")).unwrap();
            solfront::strip_comments(&raw).unwrap()
        })
        .collect();
    for draw in 0..1000u64 {
        let source = &contracts[(draw % 50) as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(draw);
        let ex = datasetgen::infill::make_infill_example(source, "c", &mut rng).unwrap();
        let rebuilt = format!("{}{}{}", ex.pre_text, ex.mid_text, ex.suf_text);
        if rebuilt != source.text {
            errors.push(format!("draw {draw}: byte reconstruction failed"));
        }
        let stream = solfront::tokenize(source).unwrap();
        let all: Vec<&str> = stream.tokens.iter().map(|t| t.lexeme.as_str()).collect();
        let joined: Vec<&str> = ex
            .pre_tokens
            .iter()
            .chain(&ex.mid_tokens)
            .chain(&ex.suf_tokens)
            .map(String::as_str)
            .collect();
        if joined != all {
            errors.push(format!("draw {draw}: token reconstruction failed"));
        }
        let s = stream.tokens.len() / 5;
        if !(s..2 * s).contains(&ex.j) || !(3 * s..4 * s).contains(&ex.k) {
            errors.push(format!("draw {draw}: j={} k={} outside segments", ex.j, ex.k));
        }
        if errors.len() > 4 {
            break;
        }
    }

    let mut psm = 0usize;
    let draws = 10_000u64;
    for draw in 0..draws {
        let source = &contracts[(draw % 50) as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(1_000_000 + draw);
        let ex = datasetgen::infill::make_infill_example(source, "c", &mut rng).unwrap();
        if ex.mode == Mode::Psm {
            psm += 1;
        }
    }
    let fraction = psm as f64 / draws as f64;
    if !(0.45..=0.55).contains(&fraction) {
        errors.push(format!("psm fraction {fraction}"));
    }
    verdict("03", "infill-round-trip", &errors);
}

// --- criterion 4: dataset format conformance ------------------------------

#[test]
fn criterion_04_dataset_format_conformance() {
    let mut errors = Vec::new();
    let corpus: Vec<(String, ContractSource)> = (0..21)
        .map(|i| {
            (
                format!("c{i:02}"),
                ContractSource::new(toy_contract(i, is_vulnerable(i)), format!("c{i:02}")).unwrap(),
            )
        })
        .collect();
    let labeled: Vec<(String, ContractSource, Tag)> = corpus
        .iter()
        .enumerate()
        .map(|(i, (id, src))| {
            let tag = if is_vulnerable(i) { Tag::Vulnerable } else { Tag::Security };
            (id.clone(), src.clone(), tag)
        })
        .collect();

    for record in build_vd_dataset(&labeled).unwrap() {
        if record.target_text != TAG_SECURITY && record.target_text != TAG_VULNERABLE {
            errors.push(format!("VD target {:?}", record.target_text));
        }
    }
    let ti_items: Vec<(String, String, String, Tag)> = labeled
        .iter()
        .map(|(id, src, tag)| {
            let instruction = datasetgen::extract_instruction(src).unwrap();
            (id.clone(), instruction, src.text.clone(), *tag)
        })
        .collect();
    for record in build_ti_dataset(&ti_items).unwrap() {
        let tag_block = record.tag.target_string().unwrap();
        if !record.input_text.ends_with(tag_block) {
            errors.push(format!("TI input does not end with {tag_block}"));
        }
    }

    // 105 records: |valid| = |test| = 10, remainder to train.
    let (ci_records, _) = build_ci_dataset(&corpus, 5).unwrap();
    assert_eq!(ci_records.len(), 105);
    let split = split_811(&ci_records, 5).unwrap();
    if (split.train.len(), split.valid.len(), split.test.len()) != (85, 10, 10) {
        errors.push(format!(
            "split sizes {}/{}/{}",
            split.train.len(),
            split.valid.len(),
            split.test.len()
        ));
    }

    let dir = tempfile::tempdir().unwrap();
    let (again, _) = build_ci_dataset(&corpus, 5).unwrap();
    let (p1, p2) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    write_records(&p1, &ci_records).unwrap();
    write_records(&p2, &again).unwrap();
    if std::fs::read(&p1).unwrap() != std::fs::read(&p2).unwrap() {
        errors.push("same-seed rebuild differs".into());
    }
    verdict("04", "dataset-format-conformance", &errors);
}

// --- criterion 5: gradients vs central finite differences -----------------

fn param_count(model: &TinyLm) -> usize {
    let mut n = model.embed.len() + model.pos.len() + model.head.len();
    n += model.ln_f.g.len() + model.ln_f.b.len();
    for layer in &model.layers {
        n += layer.wq.len() + layer.wk.len() + layer.wv.len() + layer.wo.len();
        n += layer.w1.len() + layer.b1.len() + layer.w2.len() + layer.b2.len();
        n += layer.ln1.g.len() + layer.ln1.b.len() + layer.ln2.g.len() + layer.ln2.b.len();
    }
    n
}

#[test]
fn criterion_05_gradient_finite_differences() {
    let mut errors = Vec::new();
    let tokenizer = BpeTokenizer::byte_level();
    let cfg = TinyLmConfig {
        vocab_size: tokenizer.vocab_size(),
        embed_dim: 4,
        num_layers: 1,
        num_heads: 2,
        context_len: 16,
        seed: 77,
    };
    let mut model = TinyLm::new(cfg, tokenizer).unwrap();
    if param_count(&model) > 5000 {
        errors.push(format!("model too large: {} params", param_count(&model)));
    }
    let mut adapters = AdapterWeights::init(&model.cfg, 1, 8.0, 3).unwrap();
    // Non-zero B so gradients reach both factors.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for layer in &mut adapters.layers {
        for pair in [&mut layer.q, &mut layer.k, &mut layer.v, &mut layer.o] {
            pair.b.mapv_inplace(|_| rng.gen_range(-0.1..0.1));
        }
    }

    let (input, target) = ("abc", "de");
    let ex = model.encode_example(input, target).unwrap();
    let (_, grads) = model.loss_and_grads(Some(&adapters), &ex).unwrap();
    let h = 1e-5;
    let mut checked = 0usize;
    let mut check = |analytic: f64, fd: f64, what: &str, errors: &mut Vec<String>| {
        checked += 1;
        if analytic.abs() < 1e-10 && fd.abs() < 1e-10 {
            return;
        }
        let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs());
        if rel > 1e-4 {
            errors.push(format!("{what}: analytic {analytic} fd {fd} rel {rel}"));
        }
    };
    let loss =
        |model: &TinyLm, adapters: &AdapterWeights| model.masked_nll(Some(adapters), input, target).unwrap().loss;

    // Every adapter entry, both factors, all four projections.
    for which in 0..4 {
        for factor in 0..2 {
            let dims = {
                let l = &adapters.layers[0];
                let p = [&l.q, &l.k, &l.v, &l.o][which];
                if factor == 0 { p.b.dim() } else { p.a.dim() }
            };
            for r in 0..dims.0 {
                for c in 0..dims.1 {
                    let analytic = {
                        let g = &grads.adapters[0];
                        let pg = [&g.q, &g.k, &g.v, &g.o][which];
                        if factor == 0 { pg.b[(r, c)] } else { pg.a[(r, c)] }
                    };
                    let bump = |delta: f64, a: &mut AdapterWeights| {
                        let l = &mut a.layers[0];
                        let p = match which {
                            0 => &mut l.q,
                            1 => &mut l.k,
                            2 => &mut l.v,
                            _ => &mut l.o,
                        };
                        if factor == 0 {
                            p.b[(r, c)] += delta;
                        } else {
                            p.a[(r, c)] += delta;
                        }
                    };
                    bump(h, &mut adapters);
                    let up = loss(&model, &adapters);
                    bump(-2.0 * h, &mut adapters);
                    let down = loss(&model, &adapters);
                    bump(h, &mut adapters);
                    check(
                        analytic,
                        (up - down) / (2.0 * h),
                        &format!("adapter[{which}][{factor}][{r},{c}]"),
                        &mut errors,
                    );
                }
            }
        }
    }

    // Sampled base-weight entries from every group.
    let mut pick = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let (r, c) = (pick.gen_range(0..4), pick.gen_range(0..4));
        let analytic = grads.layers[0].wq[(r, c)];
        model.layers[0].wq[(r, c)] += h;
        let up = loss(&model, &adapters);
        model.layers[0].wq[(r, c)] -= 2.0 * h;
        let down = loss(&model, &adapters);
        model.layers[0].wq[(r, c)] += h;
        check(analytic, (up - down) / (2.0 * h), &format!("wq[{r},{c}]"), &mut errors);
    }
    let used_tokens = ex.tokens.clone();
    for &tok in &used_tokens {
        for c in 0..4 {
            let analytic = grads.embed[(tok as usize, c)];
            model.embed[(tok as usize, c)] += h;
            let up = loss(&model, &adapters);
            model.embed[(tok as usize, c)] -= 2.0 * h;
            let down = loss(&model, &adapters);
            model.embed[(tok as usize, c)] += h;
            check(analytic, (up - down) / (2.0 * h), &format!("embed[{tok},{c}]"), &mut errors);
        }
    }
    for _ in 0..20 {
        let (r, c) = (pick.gen_range(0..4), pick.gen_range(0..model.cfg.vocab_size));
        let analytic = grads.head[(r, c)];
        model.head[(r, c)] += h;
        let up = loss(&model, &adapters);
        model.head[(r, c)] -= 2.0 * h;
        let down = loss(&model, &adapters);
        model.head[(r, c)] += h;
        check(analytic, (up - down) / (2.0 * h), &format!("head[{r},{c}]"), &mut errors);
    }
    for _ in 0..10 {
        let (r, c) = (pick.gen_range(0..4), pick.gen_range(0..16));
        let analytic = grads.layers[0].w1[(r, c)];
        model.layers[0].w1[(r, c)] += h;
        let up = loss(&model, &adapters);
        model.layers[0].w1[(r, c)] -= 2.0 * h;
        let down = loss(&model, &adapters);
        model.layers[0].w1[(r, c)] += h;
        check(analytic, (up - down) / (2.0 * h), &format!("w1[{r},{c}]"), &mut errors);
    }
    for c in 0..4 {
        let analytic = grads.lnf_g[c];
        model.ln_f.g[c] += h;
        let up = loss(&model, &adapters);
        model.ln_f.g[c] -= 2.0 * h;
        let down = loss(&model, &adapters);
        model.ln_f.g[c] += h;
        check(analytic, (up - down) / (2.0 * h), &format!("lnf_g[{c}]"), &mut errors);
    }
    assert!(checked >= 50, "only {checked} entries checked");
    verdict("05", "gradient-finite-differences", &errors);
}

// --- criterion 6: adapter zero-init and low-rank update -------------------

#[test]
fn criterion_06_adapter_zero_init_and_rank() {
    let mut errors = Vec::new();
    let tokenizer = BpeTokenizer::byte_level();
    let cfg = TinyLmConfig {
        vocab_size: tokenizer.vocab_size(),
        embed_dim: 16,
        num_layers: 1,
        num_heads: 2,
        context_len: 64,
        seed: 21,
    };
    let model = TinyLm::new(cfg, tokenizer).unwrap();
    let adapters = AdapterWeights::init(&model.cfg, 4, 32.0, 9).unwrap();

    let tokens = model.tokenizer.encode("contract A { }");
    let base = model.forward(None, &tokens).unwrap();
    let with_zero_b = model.forward(Some(&adapters), &tokens).unwrap();
    if base != with_zero_b {
        errors.push("zero-B adapters changed the output".into());
    }

    let records: Vec<TrainingRecord> = (0..6)
        .map(|i| TrainingRecord {
            stage: Stage::Ci,
            input_text: format!("in{i}"),
            target_text: "out".into(),
            tag: Tag::None,
            source_id: format!("r{i}"),
        })
        .collect();
    let train_cfg = TrainConfig {
        learning_rate: 0.01,
        epochs_ci: 3,
        optimizer: Optimizer::Adam,
        ..TrainConfig::default()
    };
    let (trained, _) = train_stage(&model, &adapters, &records, &train_cfg, Stage::Ci).unwrap();
    let zero = Array2::<f64>::zeros((16, 16));
    for (pi, pair) in [
        &trained.layers[0].q,
        &trained.layers[0].k,
        &trained.layers[0].v,
        &trained.layers[0].o,
    ]
    .iter()
    .enumerate()
    {
        // W_eff − W0 isolated by running the update against a zero base.
        let update = trained.effective(&zero, pair);
        let svals = singular_values(&update);
        if svals[0] > 0.0 {
            for (idx, &sv) in svals.iter().enumerate().skip(4) {
                if sv >= 1e-8 * svals[0] {
                    errors.push(format!("projection {pi}: sv[{idx}] = {sv} vs leading {}", svals[0]));
                }
            }
        }
    }
    verdict("06", "adapter-zero-init-and-rank", &errors);
}

// --- criterion 7: staged training, desk scale -----------------------------

#[test]
fn criterion_07_staged_training_effects() {
    let mut errors = Vec::new();
    let corpus: Vec<(String, ContractSource)> = (0..200)
        .map(|i| {
            (
                format!("v{i:03}"),
                ContractSource::new(toy_contract(i, is_vulnerable(i)), format!("v{i:03}")).unwrap(),
            )
        })
        .collect();
    let texts: Vec<&str> = corpus.iter().map(|(_, s)| s.text.as_str()).collect();
    let tokenizer = BpeTokenizer::train(&texts, 80);
    let cfg = TinyLmConfig {
        vocab_size: tokenizer.vocab_size(),
        embed_dim: 64,
        num_layers: 1,
        num_heads: 2,
        context_len: 256,
        seed: 3,
    };
    let model = TinyLm::new(cfg, tokenizer).unwrap();
    let adapters = AdapterWeights::init(&model.cfg, 16, 32.0, 5).unwrap();
    let train_cfg = TrainConfig {
        learning_rate: 0.003,
        optimizer: Optimizer::Adam,
        epochs_ci: 10,
        epochs_vd: 10,
        epochs_ti: 3,
        lora_r: 16,
        seed: 9,
        ..TrainConfig::default()
    };

    // 7a: infilling loss halves within ten epochs.
    let (ci_records, skipped) = build_ci_dataset(&corpus, 11).unwrap();
    assert!(skipped.is_empty());
    let (adapters_ci, ci_logs) =
        train_stage(&model, &adapters, &ci_records, &train_cfg, Stage::Ci).unwrap();
    let (first, last) = (ci_logs[0].mean_loss, ci_logs.last().unwrap().mean_loss);
    if !(last <= 0.5 * first) {
        errors.push(format!("7a: CI loss {first:.3} -> {last:.3}, no halving"));
    }

    // 7b: held-out tag accuracy on the separable marker labels.
    let labeled: Vec<(String, ContractSource, Tag)> = corpus
        .iter()
        .enumerate()
        .map(|(i, (id, src))| {
            let tag = if is_vulnerable(i) { Tag::Vulnerable } else { Tag::Security };
            (id.clone(), src.clone(), tag)
        })
        .collect();
    let vd_train = build_vd_dataset(&labeled[..180]).unwrap();
    let vd_held = build_vd_dataset(&labeled[180..]).unwrap();
    let (adapters_vd, _) =
        train_stage(&model, &adapters_ci, &vd_train, &train_cfg, Stage::Vd).unwrap();
    let mut correct = 0usize;
    for record in &vd_held {
        let nll = |target: &str| {
            model
                .masked_nll(Some(&adapters_vd), &record.input_text, target)
                .unwrap()
                .loss
        };
        let predicted = if nll(TAG_SECURITY) <= nll(TAG_VULNERABLE) {
            Tag::Security
        } else {
            Tag::Vulnerable
        };
        if predicted == record.tag {
            correct += 1;
        }
    }
    let accuracy = correct as f64 / vd_held.len() as f64;
    if accuracy < 0.9 {
        errors.push(format!("7b: held-out tag accuracy {accuracy}"));
    }

    // 7c: after instruction tuning, the planted marker function is less
    // likely under the security tag than the vulnerable tag at the point
    // in the code where it would appear (lower mean log-probability, and
    // a paired sign test at p < 0.01 needs >= 62 of 100 prompts).
    let ti_items: Vec<(String, String, String, Tag)> = labeled
        .iter()
        .map(|(id, src, tag)| {
            let instruction = datasetgen::extract_instruction(src).unwrap();
            (id.clone(), instruction, src.text.clone(), *tag)
        })
        .collect();
    let ti_records = build_ti_dataset(&ti_items).unwrap();
    let (adapters_ti, _) =
        train_stage(&model, &adapters_vd, &ti_records, &train_cfg, Stage::Ti).unwrap();
    assert_eq!(adapters_ti.lineage, vec![Stage::Ci, Stage::Vd, Stage::Ti]);
    let mut lower_under_security = 0usize;
    let (mut nll_sec_sum, mut nll_vul_sum) = (0.0, 0.0);
    let probe_target = format!("function claim() public {{ {MARKER} }}");
    for i in 0..100 {
        let instruction = datasetgen::extract_instruction(&corpus[2 * i].1).unwrap();
        let vul_text = &corpus[2 * i + 1].1.text;
        let prefix = &vul_text[..vul_text.find("function claim").unwrap()];
        let secure = format!("{instruction}\n{TI_PROMPT}\n{TAG_SECURITY}{prefix}");
        let vulnerable = format!("{instruction}\n{TI_PROMPT}\n{TAG_VULNERABLE}{prefix}");
        let nll_secure = model
            .masked_nll(Some(&adapters_ti), &secure, &probe_target)
            .unwrap()
            .loss;
        let nll_vulnerable = model
            .masked_nll(Some(&adapters_ti), &vulnerable, &probe_target)
            .unwrap()
            .loss;
        nll_sec_sum += nll_secure;
        nll_vul_sum += nll_vulnerable;
        // Higher NLL = lower log-probability.
        if nll_secure > nll_vulnerable {
            lower_under_security += 1;
        }
    }
    if nll_sec_sum <= nll_vul_sum {
        errors.push(format!(
            "7c: mean marker NLL {:.3} under security vs {:.3} under vulnerable",
            nll_sec_sum / 100.0,
            nll_vul_sum / 100.0
        ));
    }
    if lower_under_security < 62 {
        errors.push(format!(
            "7c: marker less likely under security tag in only {lower_under_security}/100 prompts"
        ));
    }
    verdict("07", "staged-training-effects", &errors);
}

// --- criterion 8: detector fixture suite ----------------------------------

#[test]
fn criterion_08_detector_fixture_suite() {
    use secscan::fixtures::{FIXTURES, HARD_CLASSES};
    let mut errors = Vec::new();
    let mut tallies: HashMap<secscan::VulnClass, (usize, usize, usize)> = HashMap::new();
    for fixture in FIXTURES {
        let source = ContractSource::new(fixture.source, fixture.name).unwrap();
        let outcome = secscan::detect(&source);
        for &class in HARD_CLASSES {
            let expected = fixture.expected.contains(&class);
            let found = outcome.findings.iter().any(|f| f.class == class);
            let entry = tallies.entry(class).or_default();
            match (expected, found) {
                (true, true) => entry.0 += 1,
                (false, true) => entry.1 += 1,
                (true, false) => entry.2 += 1,
                (false, false) => {}
            }
        }
    }
    for (&class, &(tp, fp, fn_)) in &tallies {
        if tp == 0 || fp != 0 || fn_ != 0 {
            errors.push(format!("{}: tp={tp} fp={fp} fn={fn_}", class.as_str()));
        }
    }

    // The canonical reentrant withdrawal: external value call before the
    // balance is zeroed.
    let canonical = "pragma solidity ^0.8.0;\n\
        contract Bank {\n\
            mapping(address => uint256) balances;\n\
            function withdraw() public {\n\
                require(balances[msg.sender] > 0);\n\
                uint256 amount = balances[msg.sender];\n\
                (bool ok,) = msg.sender.call{value: amount}(\"\");\n\
                require(ok);\n\
                balances[msg.sender] = 0;\n\
            }\n\
        }\n";
    let outcome = secscan::detect(&ContractSource::new(canonical, "canonical-withdraw").unwrap());
    if !outcome.findings.iter().any(|f| f.class == secscan::VulnClass::RE) {
        errors.push("canonical reentrant withdrawal not flagged RE".into());
    }
    verdict("08", "detector-fixture-suite", &errors);
}

// --- criterion 9: security metrics vs counting oracle ---------------------

#[test]
fn criterion_09_security_metrics_oracle() {
    use secscan::{CompileResult, CompileTool, Confidence, VulnClass, VulnFinding};
    let mut errors = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let round2 = |n: usize, d: usize| {
        if d == 0 {
            0.0
        } else {
            (n as f64 / d as f64 * 10_000.0).round() / 100.0
        }
    };
    for case in 0..500 {
        let total = rng.gen_range(1..50usize);
        let mut results = Vec::with_capacity(total);
        let (mut compiled, mut with_findings) = (0usize, 0usize);
        for _ in 0..total {
            let ok = rng.gen_bool(0.7);
            let findings = if rng.gen_bool(0.4) {
                vec![VulnFinding {
                    class: VulnClass::RE,
                    span: (0, 1),
                    detector: "x".into(),
                    confidence: Confidence::High,
                }]
            } else {
                Vec::new()
            };
            if ok {
                compiled += 1;
                if !findings.is_empty() {
                    with_findings += 1;
                }
            }
            results.push((
                CompileResult {
                    compiled: ok,
                    tool: CompileTool::ExternalSolc,
                    diagnostics: Vec::new(),
                },
                findings,
            ));
        }
        let summary = secscan::security_metrics(&results).unwrap();
        let want = (
            round2(compiled, total),
            round2(with_findings, compiled),
            round2(compiled - with_findings, total),
        );
        if (summary.com_pass, summary.vul_rate, summary.safe_aval) != want {
            errors.push(format!("case {case}: {summary:?} != {want:?}"));
        }
        if summary.safe_aval > summary.com_pass + 1e-9 {
            errors.push(format!("case {case}: safe_aval > com_pass"));
        }
        if errors.len() > 4 {
            break;
        }
    }
    verdict("09", "security-metrics-oracle", &errors);
}

// --- criterion 10: sampler contracts --------------------------------------

#[test]
fn criterion_10_sampler_contracts() {
    let mut errors = Vec::new();
    for seed in 0..100u64 {
        let tokenizer = BpeTokenizer::byte_level();
        let cfg = TinyLmConfig {
            vocab_size: tokenizer.vocab_size(),
            embed_dim: 8,
            num_layers: 1,
            num_heads: 2,
            context_len: 32,
            seed,
        };
        let model = TinyLm::new(cfg, tokenizer).unwrap();
        let sampler = SamplerConfig {
            temperature: 1e-12,
            max_new_tokens: 4,
            seed,
            ..SamplerConfig::default()
        };
        let sampled = tinylm::sample(&model, None, "ab", &sampler).unwrap();
        // Independent greedy decode.
        let mut tokens = vec![EOT];
        tokens.extend(model.tokenizer.encode("ab"));
        let mut greedy = Vec::new();
        for _ in 0..4 {
            let probs = model.forward(None, &tokens).unwrap();
            let last = probs.row(probs.nrows() - 1);
            let mut best = 0usize;
            for (i, &p) in last.iter().enumerate() {
                if p > last[best] {
                    best = i;
                }
            }
            if best as u32 == EOT {
                break;
            }
            tokens.push(best as u32);
            greedy.push(best as u32);
        }
        if sampled != model.tokenizer.decode(&greedy) {
            errors.push(format!("seed {seed}: low-temperature != greedy"));
        }
        if errors.len() > 4 {
            break;
        }
    }

    let probs = ndarray::Array1::from(vec![0.5, 0.3, 0.15, 0.05]);
    let kept = nucleus(&probs, 0.95);
    let want = [(0, 10.0 / 19.0), (1, 6.0 / 19.0), (2, 3.0 / 19.0)];
    if kept.len() != 3
        || kept
            .iter()
            .zip(want.iter())
            .any(|(&(i, p), &(wi, wp))| i != wi || (p - wp).abs() > 1e-12)
    {
        errors.push(format!("nucleus hand case: {kept:?}"));
    }

    let tokenizer = BpeTokenizer::byte_level();
    let cfg = TinyLmConfig {
        vocab_size: tokenizer.vocab_size(),
        embed_dim: 8,
        num_layers: 1,
        num_heads: 2,
        context_len: 48,
        seed: 4,
    };
    let model = TinyLm::new(cfg, tokenizer).unwrap();
    let sampler = SamplerConfig {
        temperature: 1.0,
        max_new_tokens: 16,
        seed: 123,
        ..SamplerConfig::default()
    };
    let a = tinylm::sample(&model, None, "contract", &sampler).unwrap();
    let b = tinylm::sample(&model, None, "contract", &sampler).unwrap();
    if a != b {
        errors.push("fixed seed not byte-identical".into());
    }
    verdict("10", "sampler-contracts", &errors);
}

// --- criterion 11: end-to-end pipeline ------------------------------------

fn run_forge(config: &std::path::Path, args: &[&str]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .expect("spawn forge")
}

fn full_pipeline(root: &std::path::Path, out_name: &str) -> (Vec<u8>, Vec<u8>) {
    let out_dir = root.join(out_name);
    let cfg = forge::PipelineConfig {
        corpus_dir: root.join("corpus"),
        labels_path: root.join("labels.jsonl"),
        tasks_path: root.join("tasks.jsonl"),
        output_dir: out_dir.clone(),
        seed: 7,
        model: forge::config::ModelConfig {
            num_merges: 60,
            embed_dim: 8,
            num_layers: 1,
            num_heads: 2,
            context_len: 256,
        },
        train: TrainConfig {
            learning_rate: 0.01,
            optimizer: Optimizer::Adam,
            epochs_ci: 1,
            epochs_vd: 1,
            epochs_ti: 1,
            lora_r: 2,
            ..TrainConfig::default()
        },
        sampler: SamplerConfig {
            max_new_tokens: 64,
            ..SamplerConfig::default()
        },
        ..forge::PipelineConfig::default()
    };
    let config_path = root.join(format!("{out_name}.toml"));
    std::fs::write(&config_path, toml::to_string(&cfg).unwrap()).unwrap();

    for args in [
        vec!["ingest"],
        vec!["build"],
        vec!["train"],
        vec!["generate"],
        vec!["evaluate"],
        vec!["report"],
    ] {
        let output = run_forge(&config_path, &args);
        assert!(
            output.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
    (
        std::fs::read(out_dir.join("summary.json")).unwrap(),
        std::fs::read(out_dir.join("report.md")).unwrap(),
    )
}

#[test]
fn criterion_11_end_to_end_pipeline() {
    let mut errors = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    write_corpus(&dir.path().join("corpus"), &dir.path().join("labels.jsonl"), 20);
    let tasks: Vec<serde_json::Value> = (0..10)
        .map(|i| {
            let source = ContractSource::new(toy_contract(i, false), format!("t{i}")).unwrap();
            serde_json::json!({
                "task_id": format!("t{i}"),
                "instruction": datasetgen::extract_instruction(&source).unwrap(),
                "reference_code": source.text,
            })
        })
        .collect();
    let tasks_text: String = tasks.iter().map(|t| format!("{t}\n")).collect();
    std::fs::write(dir.path().join("tasks.jsonl"), tasks_text).unwrap();

    let (summary1, report1) = full_pipeline(dir.path(), "run1");
    let (summary2, report2) = full_pipeline(dir.path(), "run2");
    if summary1 != summary2 {
        errors.push("summary.json differs between reruns".into());
    }
    if report1 != report2 {
        errors.push("report.md differs between reruns".into());
    }

    let report = String::from_utf8(report1).unwrap();
    let header = report.lines().find(|l| l.contains("AvgBLEU"));
    match header {
        Some(line) => {
            let cols: Vec<&str> = line.trim_matches('|').split('|').map(str::trim).collect();
            if cols
                != [
                    "AvgBLEU",
                    "BestBLEU",
                    "AvgCB",
                    "BestCB",
                    "ComPass(%)",
                    "VulRate(%)",
                    "SafeAval(%)",
                ]
            {
                errors.push(format!("report columns: {cols:?}"));
            }
        }
        None => errors.push("report has no results header".into()),
    }

    // 10 tasks × 5 samples per task.
    let samples = std::fs::read_to_string(dir.path().join("run1").join("samples.jsonl")).unwrap();
    if samples.lines().count() != 50 {
        errors.push(format!("expected 50 samples, got {}", samples.lines().count()));
    }
    verdict("11", "end-to-end-pipeline", &errors);
}
