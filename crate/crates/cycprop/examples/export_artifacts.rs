//! Train on the synthetic fixture and write every artifact the CLI would:
//! metrics.json, predictions.tsv, embeddings.tsv, and history.jsonl.

use cycprop::config::{DeltaMode, Hyperparams};
use cycprop::export;
use cycprop::ingest::split_labels;
use cycprop::metrics;
use cycprop::synth::{generate, SbmSpec};
use cycprop::trainer::train;
use std::path::Path;

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "artifacts".into());
    let out = Path::new(&out);
    std::fs::create_dir_all(out).unwrap();

    let seed = 0;
    let (g, x, labels) = generate(&SbmSpec {
        seed,
        ..SbmSpec::default()
    });
    let split = split_labels(&labels, 0.1, 5, seed).unwrap();
    let hp = Hyperparams {
        t1: 20,
        t2: 40,
        batch_size: 64,
        s_neg: 5,
        hidden_dim: 16,
        dim: 8,
        max_outer_iters: 10,
        patience: 3,
        delta_mode: DeltaMode::MedianHeuristic,
        seed,
        ..Hyperparams::default()
    };
    let result = train(&g, &x, &labels, &split, &hp).unwrap();

    let pred = metrics::predict(&result.f, &split.test);
    let truth: Vec<u32> = split
        .test
        .iter()
        .map(|&i| labels[i as usize].unwrap())
        .collect();
    let report = metrics::report(
        &pred,
        &truth,
        split.class_count,
        hp.seed,
        &hp.variant.to_string(),
        serde_json::to_value(&hp).unwrap(),
    )
    .unwrap();

    export::write_metrics(&out.join("metrics.json"), &report).unwrap();
    export::write_predictions(&out.join("predictions.tsv"), &result.f).unwrap();
    export::write_embeddings(&out.join("embeddings.tsv"), &result.embeddings).unwrap();
    export::write_history(&out.join("history.jsonl"), &result.history).unwrap();
    println!(
        "wrote 4 artifacts to {} (test micro-F1 {:.4})",
        out.display(),
        report.micro_f1
    );
}
