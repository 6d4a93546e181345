//! Sensitivity sweep over the embedding-loss weight alpha, with label splits
//! resampled per repeat. Prints mean ± std of the test micro-F1 per value.

use cycprop::config::{DeltaMode, Hyperparams};
use cycprop::ingest::split_labels;
use cycprop::synth::{generate, SbmSpec};
use cycprop::trainer::{test_metrics, train};

fn main() {
    let (g, x, labels) = generate(&SbmSpec {
        seed: 11,
        ..SbmSpec::default()
    });
    let repeats = 3u64;
    for &alpha in &[0.01, 0.1, 1.0] {
        let mut runs = Vec::new();
        for rep in 0..repeats {
            let seed = 11 + rep;
            let hp = Hyperparams {
                alpha,
                t1: 20,
                t2: 40,
                batch_size: 64,
                s_neg: 5,
                hidden_dim: 16,
                dim: 8,
                max_outer_iters: 15,
                patience: 5,
                delta_mode: DeltaMode::MedianHeuristic,
                seed,
                ..Hyperparams::default()
            };
            let split = split_labels(&labels, 0.1, 5, seed).unwrap();
            let result = train(&g, &x, &labels, &split, &hp).unwrap();
            runs.push(test_metrics(&result.f, &labels, &split).0);
        }
        let mean = runs.iter().sum::<f64>() / runs.len() as f64;
        let var = runs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / runs.len() as f64;
        println!("alpha {alpha:>5}: micro-F1 {mean:.4} ± {:.4}", var.sqrt());
    }
}
