use clap::{Parser, Subcommand, ValueEnum};
use datasetgen::Stage;
use forge::manifest::{digest_file, sha256_hex, RunManifest};
use forge::{build, evaluate, generate, ingest, report, train, ForgeError, PipelineConfig};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "forge", about = "Staged training and evaluation pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Pipeline configuration file.
    #[arg(long, global = true, default_value = "forge.toml")]
    config: PathBuf,
    /// Restrict build/train to one stage; default runs every enabled
    /// stage in order.
    #[arg(long, global = true, value_enum)]
    stage: Option<StageArg>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Filter the corpus directory down to clean single-contract files.
    Ingest,
    /// Build the staged training datasets from the ingested corpus.
    Build,
    /// Train the adapter stages, chaining from the previous checkpoint.
    Train,
    /// Sample tag-conditioned code for every task.
    Generate,
    /// Score, compile-check and scan the generated samples.
    Evaluate,
    /// Render the summary as the markdown results table.
    Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Ci,
    Vd,
    Ti,
}

impl From<StageArg> for Stage {
    fn from(value: StageArg) -> Self {
        match value {
            StageArg::Ci => Stage::Ci,
            StageArg::Vd => Stage::Vd,
            StageArg::Ti => Stage::Ti,
        }
    }
}

fn selected_stages(cfg: &PipelineConfig, arg: Option<StageArg>) -> Vec<Stage> {
    match arg {
        Some(stage) => vec![stage.into()],
        None => [
            (cfg.stages.ci, Stage::Ci),
            (cfg.stages.vd, Stage::Vd),
            (cfg.stages.ti, Stage::Ti),
        ]
        .into_iter()
        .filter_map(|(on, stage)| on.then_some(stage))
        .collect(),
    }
}

fn run(cli: &Cli) -> Result<(), ForgeError> {
    let mut cfg = PipelineConfig::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    std::fs::create_dir_all(&cfg.output_dir)?;
    let mut manifest = RunManifest::load_or_default(&cfg.output_dir);
    manifest.config_hash = sha256_hex(&std::fs::read(&cli.config)?);
    let started = Instant::now();

    let label: String;
    match cli.command {
        Command::Ingest => {
            label = "ingest".into();
            let stats = ingest::cmd_ingest(&cfg)?;
            manifest.record_artifact(ingest::CORPUS_MANIFEST);
            println!(
                "ingest: {} files, kept {}, dropped {} multi-contract, {} unparseable",
                stats.total, stats.kept, stats.dropped_multi_contract, stats.dropped_unparseable
            );
        }
        Command::Build => {
            label = "build".into();
            for stage in selected_stages(&cfg, cli.stage) {
                let (train_n, valid_n, test_n) = build::cmd_build(&cfg, stage)?;
                for part in ["train", "valid", "test"] {
                    manifest.record_artifact(&build::dataset_file(stage, part));
                }
                println!(
                    "build {}: {train_n} train / {valid_n} valid / {test_n} test",
                    stage.as_str()
                );
            }
            if cfg.labels_path.exists() {
                manifest.record_input("labels", &cfg.labels_path)?;
            }
        }
        Command::Train => {
            label = "train".into();
            for stage in selected_stages(&cfg, cli.stage) {
                let logs = train::cmd_train(&cfg, stage)?;
                manifest.record_artifact(&train::checkpoint_file(stage));
                manifest.record_artifact(&train::train_log_file(stage));
                let last = logs.last().map_or(f64::NAN, |l| l.mean_loss);
                println!(
                    "train {}: {} epochs, final mean loss {last:.4}",
                    stage.as_str(),
                    logs.len()
                );
            }
        }
        Command::Generate => {
            label = "generate".into();
            let samples = generate::cmd_generate(&cfg)?;
            manifest.record_input("tasks", &cfg.tasks_path)?;
            manifest.record_artifact(generate::SAMPLES_FILE);
            println!("generate: {} samples", samples.len());
        }
        Command::Evaluate => {
            label = "evaluate".into();
            let summary = evaluate::cmd_evaluate(&cfg)?;
            for artifact in [
                evaluate::SCORES_FILE,
                evaluate::FINDINGS_FILE,
                evaluate::SECURITY_FILE,
                evaluate::SUMMARY_FILE,
            ] {
                manifest.record_artifact(artifact);
            }
            println!(
                "evaluate: {} samples, ComPass {:.2}%, VulRate {:.2}%, SafeAval {:.2}%",
                summary.samples, summary.com_pass, summary.vul_rate, summary.safe_aval
            );
        }
        Command::Report => {
            label = "report".into();
            let rendered = report::cmd_report(&cfg)?;
            manifest.record_artifact(report::REPORT_FILE);
            print!("{rendered}");
        }
    }

    manifest.record_timing(&label, started.elapsed().as_millis() as u64);
    // Input digests for determinism checks: what the run actually read.
    if cfg.artifact(ingest::CORPUS_MANIFEST).exists() {
        let digest = digest_file(&cfg.artifact(ingest::CORPUS_MANIFEST))?;
        manifest.input_digests.insert("corpus_manifest".into(), digest);
    }
    manifest.save(&cfg.output_dir)?;
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("forge: {err}");
        std::process::exit(err.exit_code());
    }
}
