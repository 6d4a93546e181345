//! Full citation-network experiment: 30% train / 100 validation, CycProp vs
//! the LLGC baseline, repeated with resampled splits.
//!
//! Needs the dataset at `data/cora/` (graph.tsv, attrs.tsv, labels.tsv); see
//! `scripts/convert_planetoid.py` for producing those files from a Planetoid
//! checkout. Usage: `cargo run --release --example cora -- [REPEATS]`

use cycprop::baselines::{run_llgc, BaselineConfig, BaselineMethod};
use cycprop::config::{DeltaMode, Hyperparams};
use cycprop::ingest::{load_dataset, split_labels};
use cycprop::trainer::{test_metrics, train};
use std::path::Path;

fn main() {
    let repeats: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().unwrap())
        .unwrap_or(10);
    let dir = Path::new("data/cora");
    if !dir.join("graph.tsv").exists() {
        eprintln!(
            "data/cora/ not found. Produce graph.tsv, attrs.tsv, labels.tsv there \
             (scripts/convert_planetoid.py) and rerun."
        );
        std::process::exit(1);
    }
    let (g, mut x, labels) = load_dataset(
        &dir.join("graph.tsv"),
        &dir.join("attrs.tsv"),
        &dir.join("labels.tsv"),
    )
    .unwrap();
    x.l2_normalize_rows();
    println!("{} nodes", g.node_count());

    let mut cyc = Vec::new();
    let mut llgc = Vec::new();
    for rep in 0..repeats {
        let split = split_labels(&labels, 0.3, 100, rep).unwrap();
        let hp = Hyperparams {
            delta_mode: DeltaMode::MedianHeuristic,
            row_normalize: true,
            max_outer_iters: 20,
            patience: 5,
            seed: rep,
            ..Hyperparams::default()
        };
        let result = train(&g, &x, &labels, &split, &hp).unwrap();
        let micro = test_metrics(&result.f, &labels, &split).0;
        cyc.push(micro);
        let cfg = BaselineConfig {
            method: BaselineMethod::Llgc,
            ..BaselineConfig::default()
        };
        let f = run_llgc(&g, &x, &labels, &split, &cfg).unwrap();
        let b = test_metrics(&f, &labels, &split).0;
        llgc.push(b);
        println!("repeat {rep}: cycprop {micro:.4}, llgc {b:.4}");
    }
    let stats = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
        (mean, var.sqrt())
    };
    let (cm, cs) = stats(&cyc);
    let (lm, ls) = stats(&llgc);
    println!("cycprop micro-F1 {cm:.4} ± {cs:.4}   llgc {lm:.4} ± {ls:.4}");
}
