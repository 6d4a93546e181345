//! Run the two classic label-propagation baselines (harmonic / GFHF and
//! LLGC) on the synthetic fixture and compare their test accuracy.

use cycprop::baselines::{run_gfhf, run_llgc, BaselineConfig, BaselineMethod};
use cycprop::ingest::split_labels;
use cycprop::synth::{generate, SbmSpec};
use cycprop::trainer::test_metrics;

fn main() {
    let seed = 1;
    let (g, x, labels) = generate(&SbmSpec {
        seed,
        ..SbmSpec::default()
    });
    let split = split_labels(&labels, 0.1, 5, seed).unwrap();

    let cfg = BaselineConfig {
        method: BaselineMethod::Gfhf,
        ..BaselineConfig::default()
    };
    let f = run_gfhf(&g, &x, &labels, &split, &cfg).unwrap();
    let (micro, macro_, _) = test_metrics(&f, &labels, &split);
    println!("gfhf: micro-F1 {micro:.4}, macro-F1 {macro_:.4}");

    let cfg = BaselineConfig {
        method: BaselineMethod::Llgc,
        beta: 0.99,
        ..BaselineConfig::default()
    };
    let f = run_llgc(&g, &x, &labels, &split, &cfg).unwrap();
    let (micro, macro_, _) = test_metrics(&f, &labels, &split);
    println!("llgc: micro-F1 {micro:.4}, macro-F1 {macro_:.4}");
}
