//! Generate a synthetic dataset on disk in the engine's text formats
//! (graph.tsv, attrs.tsv, labels.tsv), ready for the `cycprop` CLI.
//!
//! Usage: `cargo run --example make_dataset -- OUT_DIR [SEED]`

use cycprop::ingest::canonical_texts;
use cycprop::synth::{generate, SbmSpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = args.next().unwrap_or_else(|| "sbm_data".into());
    let seed: u64 = args.next().map(|s| s.parse().unwrap()).unwrap_or(0);
    let (g, x, labels) = generate(&SbmSpec {
        seed,
        ..SbmSpec::default()
    });
    let (gs, xs, ls) = canonical_texts(&g, &x, &labels);
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(format!("{dir}/graph.tsv"), gs).unwrap();
    std::fs::write(format!("{dir}/attrs.tsv"), xs).unwrap();
    std::fs::write(format!("{dir}/labels.tsv"), ls).unwrap();
    println!(
        "wrote {dir}/graph.tsv, attrs.tsv, labels.tsv ({} nodes, seed {seed})",
        g.node_count()
    );
    println!("try: cycprop train --config run.conf --graph {dir}/graph.tsv --attrs {dir}/attrs.tsv --labels {dir}/labels.tsv --out out/");
}
