//! Score a predictions.tsv export against ground-truth labels over a chosen
//! node set — the library side of the `cycprop eval` subcommand.
//!
//! Usage: `cargo run --example eval_predictions -- PREDICTIONS LABELS ID...`
//! With no arguments it builds a self-contained demo in a temp directory.

use cycprop::export;
use cycprop::ingest;
use cycprop::metrics;
use std::path::PathBuf;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (pred_path, label_path, ids): (PathBuf, PathBuf, Vec<u32>) = if args.len() >= 3 {
        (
            args[0].clone().into(),
            args[1].clone().into(),
            args[2..].iter().map(|s| s.parse().unwrap()).collect(),
        )
    } else {
        demo()
    };

    let rows = export::read_predictions(&pred_path).unwrap();
    let by_id: std::collections::HashMap<u32, u32> =
        rows.iter().map(|&(id, arg, _)| (id, arg)).collect();
    let truth_by_id: std::collections::HashMap<u32, u32> =
        ingest::load_label_pairs(&label_path).unwrap().into_iter().collect();
    let pred: Vec<u32> = ids.iter().map(|i| by_id[i]).collect();
    let truth: Vec<u32> = ids.iter().map(|i| truth_by_id[i]).collect();
    let k = truth.iter().chain(&pred).map(|&c| c as usize + 1).max().unwrap();
    let (micro, macro_, per_class) = metrics::micro_macro_f1(&pred, &truth, k).unwrap();
    println!("{} nodes: micro-F1 {micro:.4}, macro-F1 {macro_:.4}", ids.len());
    for (c, m) in per_class.iter().enumerate() {
        println!(
            "  class {c}: precision {:.3} recall {:.3} f1 {:.3}",
            m.precision, m.recall, m.f1
        );
    }
}

// generate a toy run so the example works with no arguments
fn demo() -> (PathBuf, PathBuf, Vec<u32>) {
    use cycprop::config::{DeltaMode, Hyperparams};
    use cycprop::synth::{generate, SbmSpec};

    let dir = std::env::temp_dir().join("cycprop_eval_demo");
    std::fs::create_dir_all(&dir).unwrap();
    let (g, x, labels) = generate(&SbmSpec::default());
    let split = ingest::split_labels(&labels, 0.1, 5, 0).unwrap();
    let hp = Hyperparams {
        t1: 10,
        t2: 20,
        batch_size: 32,
        s_neg: 3,
        hidden_dim: 8,
        dim: 4,
        max_outer_iters: 5,
        patience: 2,
        delta_mode: DeltaMode::MedianHeuristic,
        ..Hyperparams::default()
    };
    let result = cycprop::trainer::train(&g, &x, &labels, &split, &hp).unwrap();
    let pred_path = dir.join("predictions.tsv");
    export::write_predictions(&pred_path, &result.f).unwrap();
    let (_, _, ls) = ingest::canonical_texts(&g, &x, &labels);
    let label_path = dir.join("labels.tsv");
    std::fs::write(&label_path, ls).unwrap();
    (pred_path, label_path, split.test)
}
