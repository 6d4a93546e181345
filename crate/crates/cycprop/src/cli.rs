//! Command-line entry points: `train`, `baseline`, `sweep`, and `eval`.
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use crate::baselines::{self, BaselineConfig, BaselineMethod};
use crate::config::{Hyperparams, Variant};
use crate::export;
use crate::graph::Graph;
use crate::ingest::{self, AttributeMatrix, LabelSplit, Labels};
use crate::metrics;
use crate::trainer;
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "cycprop", about = "Graph semi-supervised learning engine", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Full,
    LpOnly,
    GnnOnly,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Full => Variant::Full,
            VariantArg::LpOnly => Variant::LpOnly,
            VariantArg::GnnOnly => Variant::GnnOnly,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Gfhf,
    Llgc,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepParam {
    Alpha,
    D,
    Lambda0,
    R,
}

#[derive(clap::Args)]
struct DataArgs {
    /// Edge list, one `src<TAB>dst` per line.
    #[arg(long)]
    graph: PathBuf,
    /// Node attributes, `node_id<TAB>col:val ...` or dense comma rows.
    #[arg(long)]
    attrs: PathBuf,
    /// Known labels, `node_id<TAB>class_id` per line.
    #[arg(long)]
    labels: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Train the joint model and export all artifacts.
    Train {
        /// `key = value` hyperparameter file.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Output directory for metrics.json, predictions.tsv,
        /// embeddings.tsv, history.jsonl.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config-file seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config-file variant.
        #[arg(long)]
        variant: Option<VariantArg>,
    },
    /// Run a classic label-propagation baseline.
    Baseline {
        #[arg(long)]
        method: MethodArg,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
        /// Optional hyperparameter file (seed, split sizes).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// LLGC propagation coefficient.
        #[arg(long, default_value_t = 0.99)]
        beta: f64,
    },
    /// Repeat training across a parameter grid with resampled label splits.
    Sweep {
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated parameter values.
        #[arg(long)]
        values: String,
        #[arg(long)]
        repeats: usize,
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Score an existing predictions file against held-out labels.
    Eval {
        /// predictions.tsv from a previous run.
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Evaluation node ids, one per line.
        #[arg(long)]
        test_ids: PathBuf,
        /// Output directory for metrics.json.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parse `argv`, run, and map the outcome to a process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    configure_threads();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap distinguishes help/version display from real usage errors
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn load_split(
    data: &DataArgs,
    hp: &Hyperparams,
) -> Result<(Graph, AttributeMatrix, Labels, LabelSplit)> {
    let (g, mut x, labels) = ingest::load_dataset(&data.graph, &data.attrs, &data.labels)?;
    if hp.row_normalize {
        x.l2_normalize_rows();
    }
    let split = ingest::split_labels(&labels, hp.train_fraction, hp.val_count, hp.seed)?;
    Ok((g, x, labels, split))
}

fn write_run_outputs(
    out: &Path,
    f: &crate::propagation::LabelDistribution,
    labels: &Labels,
    split: &LabelSplit,
    hp: &Hyperparams,
) -> Result<f64> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("creating output directory {}", out.display()))?;
    let pred = metrics::predict(f, &split.test);
    let truth: Vec<u32> = split
        .test
        .iter()
        .map(|&i| labels[i as usize].expect("test node labeled"))
        .collect();
    let report = metrics::report(
        &pred,
        &truth,
        split.class_count,
        hp.seed,
        &hp.variant.to_string(),
        serde_json::to_value(hp)?,
    )?;
    export::write_metrics(&out.join("metrics.json"), &report)?;
    export::write_predictions(&out.join("predictions.tsv"), f)?;
    Ok(report.micro_f1)
}

#[derive(Serialize)]
struct SweepEntry {
    value: f64,
    mean: f64,
    std: f64,
    runs: Vec<f64>,
}

#[derive(Serialize)]
struct SweepReport {
    param: String,
    repeats: usize,
    seed: u64,
    entries: Vec<SweepEntry>,
}

fn apply_sweep_value(hp: &mut Hyperparams, param: SweepParam, value: f64) -> Result<()> {
    match param {
        SweepParam::Alpha => hp.alpha = value,
        SweepParam::D => {
            if value < 1.0 || value.fract() != 0.0 {
                bail!("d values must be positive integers, got {value}");
            }
            hp.dim = value as usize;
        }
        SweepParam::Lambda0 => hp.lambda0 = value,
        SweepParam::R => hp.r = value,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            config,
            data,
            out,
            seed,
            variant,
        } => {
            let mut hp = Hyperparams::load(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            if let Some(s) = seed {
                hp.seed = s;
            }
            if let Some(v) = variant {
                hp.variant = v.into();
            }
            let (g, x, labels, split) = load_split(&data, &hp)?;
            let result = trainer::train(&g, &x, &labels, &split, &hp)?;
            if let Some(diag) = &result.diagnostics {
                eprintln!("warning: run aborted early: {diag}");
            }
            let micro = write_run_outputs(&out, &result.f, &labels, &split, &hp)?;
            export::write_embeddings(&out.join("embeddings.tsv"), &result.embeddings)?;
            export::write_history(&out.join("history.jsonl"), &result.history)?;
            eprintln!(
                "test micro-F1 {micro:.4} (snapshot from outer iteration {})",
                result.selected_iter
            );
            Ok(())
        }
        Command::Baseline {
            method,
            data,
            out,
            config,
            seed,
            beta,
        } => {
            let mut hp = match config {
                Some(path) => Hyperparams::load(&path)
                    .with_context(|| format!("loading {}", path.display()))?,
                None => Hyperparams::default(),
            };
            if let Some(s) = seed {
                hp.seed = s;
            }
            let method = match method {
                MethodArg::Gfhf => BaselineMethod::Gfhf,
                MethodArg::Llgc => BaselineMethod::Llgc,
            };
            let cfg = BaselineConfig {
                method,
                beta,
                ..BaselineConfig::default()
            };
            hp.variant = Variant::Full;
            let (g, x, labels, split) = load_split(&data, &hp)?;
            let f = match method {
                BaselineMethod::Gfhf => baselines::run_gfhf(&g, &x, &labels, &split, &cfg)?,
                BaselineMethod::Llgc => baselines::run_llgc(&g, &x, &labels, &split, &cfg)?,
            };
            let micro = write_run_outputs(&out, &f, &labels, &split, &hp)?;
            eprintln!("test micro-F1 {micro:.4}");
            Ok(())
        }
        Command::Sweep {
            param,
            values,
            repeats,
            config,
            data,
            out,
            seed,
        } => {
            if repeats == 0 {
                bail!("--repeats must be at least 1");
            }
            let values: Vec<f64> = values
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .context("parsing --values")?;
            if values.is_empty() {
                bail!("--values must list at least one value");
            }
            let base = Hyperparams::load(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            let base_seed = seed.unwrap_or(base.seed);
            let (g, mut x, labels) =
                ingest::load_dataset(&data.graph, &data.attrs, &data.labels)?;
            if base.row_normalize {
                x.l2_normalize_rows();
            }
            let mut entries = Vec::new();
            for &value in &values {
                let mut runs = Vec::new();
                for rep in 0..repeats {
                    let mut hp = base.clone();
                    apply_sweep_value(&mut hp, param, value)?;
                    // resample the label split and the model init per repeat
                    hp.seed = base_seed.wrapping_add(rep as u64);
                    let split = ingest::split_labels(
                        &labels,
                        hp.train_fraction,
                        hp.val_count,
                        hp.seed,
                    )?;
                    let result = trainer::train(&g, &x, &labels, &split, &hp)?;
                    let (micro, _, _) = trainer::test_metrics(&result.f, &labels, &split);
                    runs.push(micro);
                }
                let mean = runs.iter().sum::<f64>() / runs.len() as f64;
                let var = runs.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                    / runs.len() as f64;
                entries.push(SweepEntry {
                    value,
                    mean,
                    std: var.sqrt(),
                    runs,
                });
            }
            std::fs::create_dir_all(&out)
                .with_context(|| format!("creating output directory {}", out.display()))?;
            let report = SweepReport {
                param: format!("{param:?}").to_lowercase(),
                repeats,
                seed: base_seed,
                entries,
            };
            let path = out.join("sweep.json");
            std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
        Command::Eval {
            predictions,
            labels,
            test_ids,
            out,
        } => {
            let rows = export::read_predictions(&predictions)?;
            let by_id: std::collections::HashMap<u32, u32> =
                rows.iter().map(|&(id, arg, _)| (id, arg)).collect();
            let label_pairs = ingest::load_label_pairs(&labels)?;
            let truth_by_id: std::collections::HashMap<u32, u32> =
                label_pairs.iter().copied().collect();
            let ids_text = std::fs::read_to_string(&test_ids)
                .with_context(|| format!("reading {}", test_ids.display()))?;
            let mut pred = Vec::new();
            let mut truth = Vec::new();
            for (lineno, line) in ids_text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let id: u32 = line.parse().with_context(|| {
                    format!("{}:{}: bad node id", test_ids.display(), lineno + 1)
                })?;
                let p = *by_id
                    .get(&id)
                    .with_context(|| format!("node {id} missing from predictions"))?;
                let t = *truth_by_id
                    .get(&id)
                    .with_context(|| format!("node {id} missing from labels"))?;
                pred.push(p);
                truth.push(t);
            }
            if pred.is_empty() {
                bail!("{}: no evaluation ids", test_ids.display());
            }
            let class_count = truth
                .iter()
                .chain(pred.iter())
                .map(|&c| c as usize + 1)
                .max()
                .unwrap();
            let report = metrics::report(
                &pred,
                &truth,
                class_count,
                0,
                "eval",
                serde_json::json!({
                    "predictions": predictions.display().to_string(),
                    "labels": labels.display().to_string(),
                    "test_ids": test_ids.display().to_string(),
                }),
            )?;
            std::fs::create_dir_all(&out)
                .with_context(|| format!("creating output directory {}", out.display()))?;
            export::write_metrics(&out.join("metrics.json"), &report)?;
            println!("micro_f1 {:.6} macro_f1 {:.6}", report.micro_f1, report.macro_f1);
            Ok(())
        }
    }
}
