//! End-to-end acceptance gate. Each test covers one numbered criterion and
//! prints a single `criterion N: PASS` line on success; failures carry the
//! measured values in the panic message.
//!
//! Criteria 6, 7, and 9 need the Cora dataset at `data/cora/` (see
//! `scripts/convert_planetoid.py` for the expected files). They fail with a
//! clear diagnostic when the data is absent rather than silently passing.

use cycprop::baselines::{self, BaselineConfig, BaselineMethod};
use cycprop::config::{DeltaMode, Hyperparams, Variant};
use cycprop::encoder::{self, EncoderParams, NeighborPlan};
use cycprop::graph::{seeded_rng, Graph, NoiseDistribution};
use cycprop::ingest::{self, LabelSplit, Labels};
use cycprop::propagation::{
    self, gaussian_weights, lp_objective_unchecked, simplex_project, LabelDistribution,
    WeightedGraph,
};
use cycprop::sampler::{self, ContextPair};
use cycprop::synth::{generate, SbmSpec};
use cycprop::trainer::{self, test_metrics};
use rand::RngExt;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

// ---------------------------------------------------------------------------
// criterion 1: simplex projection vs exhaustive active-set oracle

/// Exact projection by enumerating every support set: the candidate with all
/// mass on support `S` is `z_i + (1 - sum_S z)/|S|`; the feasible candidate
/// closest to `z` is the projection.
fn oracle_project(z: &[f64]) -> Vec<f64> {
    let k = z.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << k) {
        let support: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
        let sum: f64 = support.iter().map(|&i| z[i]).sum();
        let eta = (1.0 - sum) / support.len() as f64;
        let mut f = vec![0.0; k];
        let mut feasible = true;
        for &i in &support {
            f[i] = z[i] + eta;
            if f[i] < -1e-12 {
                feasible = false;
                break;
            }
        }
        if !feasible {
            continue;
        }
        let dist: f64 = f.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().map_or(true, |(d, _)| dist < *d) {
            best = Some((dist, f));
        }
    }
    best.expect("full support is always feasible").1
}

#[test]
fn criterion_1_simplex_projection_oracle() {
    let start = Instant::now();
    let mut rng = seeded_rng(101);
    for trial in 0..1000 {
        let k = rng.random_range(2..=6usize);
        let z: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
        let got = simplex_project(&z);
        let want = oracle_project(&z);
        for (a, b) in got.iter().zip(&want) {
            assert!(
                (a - b).abs() <= 1e-9,
                "trial {trial}: projection {got:?} vs oracle {want:?} for z {z:?}"
            );
        }
        // idempotence (one-ulp float slack; see notes on exactness)
        let twice = simplex_project(&got);
        for (a, b) in got.iter().zip(&twice) {
            assert!((a - b).abs() <= 1e-12, "not idempotent: {got:?} -> {twice:?}");
        }
    }
    // identity on feasible points, bit-exact on exactly-summing inputs
    for trial in 0..200 {
        let k = rng.random_range(2..=6usize);
        let mut units = vec![0u32; k];
        for _ in 0..64 {
            units[rng.random_range(0..k)] += 1;
        }
        let f: Vec<f64> = units.iter().map(|&u| u as f64 / 64.0).collect();
        assert_eq!(simplex_project(&f), f, "trial {trial}: not identity on {f:?}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5 s");
    println!("criterion 1: PASS (1000 oracle matches in {elapsed:?})");
}

// ---------------------------------------------------------------------------
// criterion 2: gradient checks against central finite differences

fn random_weighted_graph(
    n: usize,
    rng: &mut cycprop::RandomSource,
) -> (Graph, WeightedGraph) {
    // random tree plus extras keeps the graph connected
    let mut edges: Vec<(u32, u32)> = (1..n as u32)
        .map(|v| (v, rng.random_range(0..v)))
        .collect();
    for _ in 0..n {
        let a = rng.random_range(0..n as u32);
        let b = rng.random_range(0..n as u32);
        if a != b {
            edges.push((a, b));
        }
    }
    let g = Graph::from_edge_list(&edges, n).unwrap();
    // arbitrary weights in (0, 1] via distances fed to the Gaussian kernel
    let mut dist_of: HashMap<(u32, u32), f64> = HashMap::new();
    for (i, j) in g.canonical_edges() {
        let w: f64 = rng.random_range(0.1..1.0);
        dist_of.insert((i, j), (-2.0 * w.ln()).sqrt());
    }
    let w = gaussian_weights(
        &g,
        |i, j| {
            let key = if i < j { (i, j) } else { (j, i) };
            let d = dist_of[&key];
            d * d
        },
        DeltaMode::Fixed,
        1.0,
    );
    (g, w)
}

fn random_interior_rows(n: usize, k: usize, rng: &mut cycprop::RandomSource) -> LabelDistribution {
    let mut f = LabelDistribution::uniform(n, k);
    for i in 0..n as u32 {
        let mut row: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
        let sum: f64 = row.iter().sum();
        for v in &mut row {
            *v /= sum;
        }
        f.row_mut(i).copy_from_slice(&row);
    }
    f
}

#[test]
fn criterion_2_gradient_checks() {
    let start = Instant::now();
    let mut rng = seeded_rng(202);

    // (a) propagation gradient, 50 interior fixtures
    for fixture in 0..50 {
        let n = rng.random_range(3..9usize);
        let k = rng.random_range(2..5usize);
        let (_, w) = random_weighted_graph(n, &mut rng);
        let f = random_interior_rows(n, k, &mut rng);
        let labels: Labels = (0..n)
            .map(|_| {
                if rng.random_range(0.0..1.0) < 0.5 {
                    Some(rng.random_range(0..k as u32))
                } else {
                    None
                }
            })
            .collect();
        let mask: Vec<bool> = labels.iter().map(|l| l.is_some()).collect();
        let phi: Vec<bool> = (0..n).map(|_| rng.random_range(0.0..1.0) < 0.5).collect();
        let mu = 10.0;
        let lambda = 0.3;
        let eps = 1e-6;
        for i in 0..n as u32 {
            let grad = propagation::lp_gradient(&f, &w, &labels, &mask, &phi, mu, i);
            for c in 0..k {
                let mut fp = f.clone();
                fp.row_mut(i)[c] += eps;
                let up = lp_objective_unchecked(&fp, &w, &labels, &mask, &phi, mu, lambda);
                let mut fm = f.clone();
                fm.row_mut(i)[c] -= eps;
                let dn = lp_objective_unchecked(&fm, &w, &labels, &mask, &phi, mu, lambda);
                let fd = (up - dn) / (2.0 * eps);
                let denom = grad[c].abs().max(fd.abs()).max(1e-8);
                assert!(
                    (grad[c] - fd).abs() / denom <= 1e-5,
                    "fixture {fixture}, node {i}, class {c}: analytic {} vs fd {fd}",
                    grad[c]
                );
            }
        }
    }

    // (b) encoder batch gradient on n <= 8 fixtures
    for fixture in 0..3u64 {
        let mut frng = seeded_rng(300 + fixture);
        let n = 6 + fixture as usize % 3;
        let mut edges = Vec::new();
        for v in 1..n as u32 {
            edges.push((v, frng.random_range(0..v)));
        }
        let g = Graph::from_edge_list(&edges, n).unwrap();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..4).map(|_| frng.random_range(-1.0..1.0)).collect())
            .collect();
        let x = cycprop::AttributeMatrix::from_dense(&rows);
        let p = EncoderParams::init(4, 5, 3, 400 + fixture);
        let plan = NeighborPlan::full(&g, &(0..n as u32).collect::<Vec<_>>());
        let mut pairs = Vec::new();
        for _ in 0..8 {
            let a = frng.random_range(0..n as u32);
            let b = frng.random_range(0..n as u32);
            let polarity = if frng.random_range(0.0..1.0) < 0.5 { 1 } else { -1 };
            pairs.push(ContextPair {
                anchor: a,
                context: b,
                polarity,
            });
        }
        let (_, grads) = encoder::batch_gradient(&p, &x, &plan, &pairs);
        let eps = 1e-6;
        for idx in 0..p.param_count() {
            let mut pp = p.clone();
            pp.set_flat(idx, p.get_flat(idx) + eps);
            let up = encoder::batch_loss(&pp, &x, &plan, &pairs);
            pp.set_flat(idx, p.get_flat(idx) - eps);
            let dn = encoder::batch_loss(&pp, &x, &plan, &pairs);
            let fd = (up - dn) / (2.0 * eps);
            let g = grads.get_flat(idx);
            let denom = g.abs().max(fd.abs()).max(1e-6);
            assert!(
                (g - fd).abs() / denom <= 1e-4,
                "fixture {fixture}, param {idx}: analytic {g} vs fd {fd}"
            );
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget 60 s");
    println!("criterion 2: PASS (propagation + encoder gradients in {elapsed:?})");
}

// ---------------------------------------------------------------------------
// criterion 3: propagation descent on the SBM fixture

fn sbm_fixture(seed: u64) -> (Graph, cycprop::AttributeMatrix, Labels, LabelSplit) {
    let (g, x, labels) = generate(&SbmSpec {
        seed,
        ..SbmSpec::default()
    });
    let split = ingest::split_labels(&labels, 0.1, 5, seed).unwrap();
    (g, x, labels, split)
}

#[test]
fn criterion_3_propagation_descent() {
    let (g, x, labels, split) = sbm_fixture(3);
    let w = gaussian_weights(&g, |i, j| x.sq_dist(i, j), DeltaMode::MedianHeuristic, 0.1);
    let mask = split.train_mask(g.node_count());
    let phi = mask.clone();
    let mu = 10.0;
    let lambda = 0.3;
    let mut f = LabelDistribution::uniform(g.node_count(), split.class_count);
    for &i in &split.train {
        f.set_one_hot(i, labels[i as usize].unwrap());
    }
    let mut prev =
        propagation::lp_objective(&f, &w, &labels, &mask, &phi, mu, lambda).unwrap();
    for step in 0..100 {
        f = propagation::lp_step(&f, &w, &labels, &mask, &phi, mu, 0.05);
        let cur = propagation::lp_objective(&f, &w, &labels, &mask, &phi, mu, lambda).unwrap();
        assert!(
            cur <= prev + 1e-8,
            "objective rose at step {step}: {prev} -> {cur}"
        );
        prev = cur;
    }
    println!("criterion 3: PASS (100 non-increasing steps, final objective {prev:.6})");
}

// ---------------------------------------------------------------------------
// criterion 4: GFHF iterative solution vs dense linear solve

#[test]
fn criterion_4_harmonic_oracle() {
    let mut rng = seeded_rng(404);
    for trial in 0..100 {
        let n = rng.random_range(5..=30usize);
        let k = rng.random_range(2..5usize);
        let (_, w) = random_weighted_graph(n, &mut rng);
        let labels: Labels = (0..n)
            .map(|i| {
                if i == 0 || rng.random_range(0.0..1.0) < 0.3 {
                    Some(rng.random_range(0..k as u32))
                } else {
                    None
                }
            })
            .collect();
        let train: Vec<u32> = (0..n as u32)
            .filter(|&i| labels[i as usize].is_some())
            .collect();
        let split = LabelSplit {
            train: train.clone(),
            val: Vec::new(),
            test: (0..n as u32)
                .filter(|&i| labels[i as usize].is_none())
                .collect(),
            class_count: k,
        };
        let cfg = BaselineConfig {
            method: BaselineMethod::Gfhf,
            max_iters: 200_000,
            tolerance: 1e-12,
            ..BaselineConfig::default()
        };
        let f = baselines::run_gfhf_weighted(&w, &labels, &split, &cfg, n, k).unwrap();

        // dense solve: (D_U - W_UU) F_U = W_UL Y_L
        let unlabeled: Vec<u32> = split.test.clone();
        if unlabeled.is_empty() {
            continue;
        }
        let pos: HashMap<u32, usize> =
            unlabeled.iter().enumerate().map(|(p, &v)| (v, p)).collect();
        let u = unlabeled.len();
        let mut a = nalgebra::DMatrix::<f64>::zeros(u, u);
        let mut b = nalgebra::DMatrix::<f64>::zeros(u, k);
        for (p, &i) in unlabeled.iter().enumerate() {
            let (nbrs, ws) = w.edges(i);
            let degree: f64 = ws.iter().sum();
            a[(p, p)] = degree;
            for (&j, &s) in nbrs.iter().zip(ws) {
                match pos.get(&j) {
                    Some(&q) => a[(p, q)] -= s,
                    None => {
                        let y = labels[j as usize].unwrap() as usize;
                        b[(p, y)] += s;
                    }
                }
            }
        }
        let solved = a.lu().solve(&b).expect("harmonic system is nonsingular");
        for (p, &i) in unlabeled.iter().enumerate() {
            for c in 0..k {
                let diff = (f.row(i)[c] - solved[(p, c)]).abs();
                assert!(
                    diff <= 1e-6,
                    "trial {trial}, node {i}, class {c}: iterative {} vs dense {} (diff {diff:e})",
                    f.row(i)[c],
                    solved[(p, c)]
                );
            }
        }
    }
    println!("criterion 4: PASS (100 graphs, L-inf <= 1e-6)");
}

// ---------------------------------------------------------------------------
// criterion 5: synthetic end-to-end accuracy, single-threaded

fn sbm_hyperparams(seed: u64) -> Hyperparams {
    Hyperparams {
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
    }
}

#[test]
fn criterion_5_synthetic_end_to_end() {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let micro = pool.install(|| {
        let (g, x, labels, split) = sbm_fixture(7);
        let hp = sbm_hyperparams(7);
        let result = trainer::train(&g, &x, &labels, &split, &hp).unwrap();
        assert!(result.diagnostics.is_none(), "{:?}", result.diagnostics);
        test_metrics(&result.f, &labels, &split).0
    });
    let elapsed = start.elapsed();
    assert!(micro >= 0.95, "test accuracy {micro} < 0.95");
    assert!(elapsed.as_secs_f64() <= 60.0, "took {elapsed:?}, budget 60 s");
    println!("criterion 5: PASS (accuracy {micro:.4} in {elapsed:?}, 1 thread)");
}

// ---------------------------------------------------------------------------
// Cora-backed criteria (6, 7, 9). These need data/cora/ in the repository
// root; the dataset is not redistributable with the code, so the tests fail
// with instructions when it is missing.

fn cora_dir() -> Result<PathBuf, String> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/cora");
    let files = ["graph.tsv", "attrs.tsv", "labels.tsv"];
    if files.iter().all(|f| root.join(f).exists()) {
        Ok(root)
    } else {
        Err(format!(
            "Cora dataset not found at {} (expected graph.tsv, attrs.tsv, labels.tsv). \
             This environment has no route to the dataset distribution; run \
             scripts/convert_planetoid.py against a Planetoid checkout to produce the \
             files, then rerun. The protocol code below is complete and runs as-is \
             once the data exists.",
            root.display()
        ))
    }
}

fn load_cora(dir: &Path) -> (Graph, cycprop::AttributeMatrix, Labels) {
    let (g, mut x, labels) = ingest::load_dataset(
        &dir.join("graph.tsv"),
        &dir.join("attrs.tsv"),
        &dir.join("labels.tsv"),
    )
    .unwrap();
    x.l2_normalize_rows();
    (g, x, labels)
}

fn cora_hyperparams(seed: u64) -> Hyperparams {
    Hyperparams {
        delta_mode: DeltaMode::MedianHeuristic,
        row_normalize: true,
        max_outer_iters: 20,
        patience: 5,
        seed,
        ..Hyperparams::default()
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    (mean, var.sqrt())
}

#[test]
fn criterion_6_cora_experiment() {
    let dir = match cora_dir() {
        Ok(d) => d,
        Err(msg) => panic!("criterion 6: BLOCKED — {msg}"),
    };
    let (g, x, labels) = load_cora(&dir);
    let mut cycprop_runs = Vec::new();
    let mut llgc_runs = Vec::new();
    for rep in 0..10u64 {
        let hp = cora_hyperparams(rep);
        let split = ingest::split_labels(&labels, 0.3, 100, rep).unwrap();
        let result = trainer::train(&g, &x, &labels, &split, &hp).unwrap();
        cycprop_runs.push(test_metrics(&result.f, &labels, &split).0);
        let cfg = BaselineConfig {
            method: BaselineMethod::Llgc,
            ..BaselineConfig::default()
        };
        let f = baselines::run_llgc(&g, &x, &labels, &split, &cfg).unwrap();
        llgc_runs.push(test_metrics(&f, &labels, &split).0);
    }
    let (cyc_mean, cyc_std) = mean_std(&cycprop_runs);
    let (llgc_mean, llgc_std) = mean_std(&llgc_runs);
    assert!(
        (0.72..=0.83).contains(&llgc_mean),
        "LLGC mean {llgc_mean:.4} outside [0.72, 0.83]"
    );
    assert!(cyc_mean >= 0.80, "CycProp mean {cyc_mean:.4} < 0.80");
    assert!(
        cyc_mean >= llgc_mean + 0.02,
        "CycProp mean {cyc_mean:.4} not 2 points above LLGC {llgc_mean:.4}"
    );
    println!(
        "criterion 6: PASS (CycProp {cyc_mean:.4}±{cyc_std:.4}, LLGC {llgc_mean:.4}±{llgc_std:.4})"
    );
}

#[test]
fn criterion_7_ablation_ordering() {
    let dir = match cora_dir() {
        Ok(d) => d,
        Err(msg) => panic!("criterion 7: BLOCKED — {msg}"),
    };
    let (g, x, labels) = load_cora(&dir);
    let mut by_variant: HashMap<&str, Vec<f64>> = HashMap::new();
    for rep in 0..5u64 {
        let split = ingest::split_labels(&labels, 0.3, 100, rep).unwrap();
        for (name, variant) in [
            ("full", Variant::Full),
            ("lp-only", Variant::LpOnly),
            ("gnn-only", Variant::GnnOnly),
        ] {
            let hp = Hyperparams {
                variant,
                ..cora_hyperparams(rep)
            };
            let result = trainer::train(&g, &x, &labels, &split, &hp).unwrap();
            by_variant
                .entry(name)
                .or_default()
                .push(test_metrics(&result.f, &labels, &split).0);
        }
    }
    let (full_m, full_s) = mean_std(&by_variant["full"]);
    let (lp_m, lp_s) = mean_std(&by_variant["lp-only"]);
    let (gnn_m, gnn_s) = mean_std(&by_variant["gnn-only"]);
    let pooled = |a: f64, b: f64| ((a * a + b * b) / 2.0).sqrt();
    assert!(
        full_m >= lp_m - pooled(full_s, lp_s),
        "full {full_m:.4} < lp-only {lp_m:.4} beyond pooled std"
    );
    assert!(
        lp_m >= gnn_m - pooled(lp_s, gnn_s),
        "lp-only {lp_m:.4} < gnn-only {gnn_m:.4} beyond pooled std"
    );
    println!(
        "criterion 7: PASS (full {full_m:.4} >= lp-only {lp_m:.4} >= gnn-only {gnn_m:.4})"
    );
}

// ---------------------------------------------------------------------------
// criterion 8: alpha-sensitivity smoke on the SBM fixture

#[test]
fn criterion_8_sensitivity_smoke() {
    let (g, x, labels, _) = sbm_fixture(11);
    let mut report = Vec::new();
    for &alpha in &[0.01, 0.1, 1.0] {
        let mut runs = Vec::new();
        for rep in 0..3u64 {
            let hp = Hyperparams {
                alpha,
                ..sbm_hyperparams(11 + rep)
            };
            let split = ingest::split_labels(&labels, 0.1, 5, 11 + rep).unwrap();
            let result = trainer::train(&g, &x, &labels, &split, &hp).unwrap();
            assert!(
                result.diagnostics.is_none(),
                "alpha {alpha}, repeat {rep}: {:?}",
                result.diagnostics
            );
            for rec in &result.history {
                assert!(
                    rec.l_lp.is_finite() && rec.l_ge.is_finite() && rec.l_total.is_finite(),
                    "alpha {alpha}, repeat {rep}: non-finite history entry {rec:?}"
                );
            }
            runs.push(test_metrics(&result.f, &labels, &split).0);
        }
        let (mean, std) = mean_std(&runs);
        assert!(mean.is_finite() && std.is_finite());
        report.push(format!("alpha {alpha}: {mean:.4}±{std:.4}"));
    }
    println!("criterion 8: PASS ({})", report.join(", "));
}

// ---------------------------------------------------------------------------
// criterion 9: byte-identical exports under identical seeds

#[test]
fn criterion_9_determinism() {
    let dir = match cora_dir() {
        Ok(d) => d,
        Err(msg) => panic!("criterion 9: BLOCKED — {msg}"),
    };
    let bin = env!("CARGO_BIN_EXE_cycprop");
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("run.conf");
    std::fs::write(
        &config,
        "seed = 5\ndelta_mode = median-heuristic\nrow_normalize = true\nmax_outer_iters = 20\n",
    )
    .unwrap();
    let run = |out: &Path| {
        let status = std::process::Command::new(bin)
            .args(["train", "--config"])
            .arg(&config)
            .arg("--graph")
            .arg(dir.join("graph.tsv"))
            .arg("--attrs")
            .arg(dir.join("attrs.tsv"))
            .arg("--labels")
            .arg(dir.join("labels.tsv"))
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    };
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    run(&a);
    run(&b);
    for file in ["predictions.tsv", "history.jsonl"] {
        let fa = std::fs::read(a.join(file)).unwrap();
        let fb = std::fs::read(b.join(file)).unwrap();
        assert!(fa == fb, "{file} differs between identical runs");
    }
    println!("criterion 9: PASS (byte-identical predictions.tsv and history.jsonl)");
}

// ---------------------------------------------------------------------------
// CLI export consistency (spec invariants for the eval-cli module)

#[test]
fn cli_train_sweep_eval_round_trip() {
    let bin = env!("CARGO_BIN_EXE_cycprop");
    let tmp = tempfile::tempdir().unwrap();
    let (g, x, labels, _) = sbm_fixture(2);
    let (gs, xs, ls) = ingest::canonical_texts(&g, &x, &labels);
    let graph = tmp.path().join("graph.tsv");
    let attrs = tmp.path().join("attrs.tsv");
    let labels_path = tmp.path().join("labels.tsv");
    std::fs::write(&graph, gs).unwrap();
    std::fs::write(&attrs, xs).unwrap();
    std::fs::write(&labels_path, ls).unwrap();
    let config = tmp.path().join("run.conf");
    std::fs::write(
        &config,
        "seed = 2\nt1 = 10\nt2 = 20\nbatch_size = 32\ns_neg = 3\nhidden_dim = 8\ndim = 4\n\
         max_outer_iters = 4\npatience = 2\ndelta_mode = median-heuristic\n\
         train_fraction = 0.1\nval_count = 5\n",
    )
    .unwrap();

    // train writes all four artifacts
    let out = tmp.path().join("run");
    let status = std::process::Command::new(bin)
        .args(["train", "--config"])
        .arg(&config)
        .arg("--graph")
        .arg(&graph)
        .arg("--attrs")
        .arg(&attrs)
        .arg("--labels")
        .arg(&labels_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for f in ["metrics.json", "predictions.tsv", "embeddings.tsv", "history.jsonl"] {
        assert!(out.join(f).exists(), "missing {f}");
    }

    // metrics recomputed from predictions.tsv agree exactly with metrics.json
    let metrics: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("metrics.json")).unwrap())
            .unwrap();
    let hp = Hyperparams::load(&config).unwrap();
    let split = ingest::split_labels(&labels, hp.train_fraction, hp.val_count, hp.seed).unwrap();
    let rows = cycprop::export::read_predictions(&out.join("predictions.tsv")).unwrap();
    let by_id: HashMap<u32, u32> = rows.iter().map(|&(id, arg, _)| (id, arg)).collect();
    let pred: Vec<u32> = split.test.iter().map(|i| by_id[i]).collect();
    let truth: Vec<u32> = split
        .test
        .iter()
        .map(|&i| labels[i as usize].unwrap())
        .collect();
    let (micro, macro_, _) =
        cycprop::metrics::micro_macro_f1(&pred, &truth, split.class_count).unwrap();
    assert_eq!(metrics["micro_f1"].as_f64().unwrap(), micro);
    assert_eq!(metrics["macro_f1"].as_f64().unwrap(), macro_);

    // eval over the test ids reproduces micro_f1 from the exports
    let ids = tmp.path().join("test_ids.txt");
    std::fs::write(
        &ids,
        split
            .test
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join("\n"),
    )
    .unwrap();
    let eval_out = tmp.path().join("eval");
    let status = std::process::Command::new(bin)
        .args(["eval", "--predictions"])
        .arg(out.join("predictions.tsv"))
        .arg("--labels")
        .arg(&labels_path)
        .arg("--test-ids")
        .arg(&ids)
        .arg("--out")
        .arg(&eval_out)
        .status()
        .unwrap();
    assert!(status.success());
    let eval_metrics: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(eval_out.join("metrics.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(eval_metrics["micro_f1"].as_f64().unwrap(), micro);

    // sweep with R=1 equals a single run at that value
    let sweep_out = tmp.path().join("sweep");
    let status = std::process::Command::new(bin)
        .args([
            "sweep",
            "--param",
            "alpha",
            "--values",
            "0.1",
            "--repeats",
            "1",
            "--config",
        ])
        .arg(&config)
        .arg("--graph")
        .arg(&graph)
        .arg("--attrs")
        .arg(&attrs)
        .arg("--labels")
        .arg(&labels_path)
        .arg("--out")
        .arg(&sweep_out)
        .status()
        .unwrap();
    assert!(status.success());
    let sweep: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(sweep_out.join("sweep.json")).unwrap(),
    )
    .unwrap();
    let entry = &sweep["entries"][0];
    assert_eq!(entry["value"].as_f64().unwrap(), 0.1);
    assert_eq!(entry["mean"], entry["runs"][0]);
    assert_eq!(entry["std"].as_f64().unwrap(), 0.0);
    // repeat 0 resamples the split with the base seed, matching the single run
    assert_eq!(entry["runs"][0].as_f64().unwrap(), micro);

    // usage error -> exit code 2
    let status = std::process::Command::new(bin)
        .args(["train", "--bogus"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn cli_baseline_exports() {
    let bin = env!("CARGO_BIN_EXE_cycprop");
    let tmp = tempfile::tempdir().unwrap();
    let (g, x, labels, _) = sbm_fixture(4);
    let (gs, xs, ls) = ingest::canonical_texts(&g, &x, &labels);
    let graph = tmp.path().join("graph.tsv");
    let attrs = tmp.path().join("attrs.tsv");
    let labels_path = tmp.path().join("labels.tsv");
    std::fs::write(&graph, gs).unwrap();
    std::fs::write(&attrs, xs).unwrap();
    std::fs::write(&labels_path, ls).unwrap();
    let config = tmp.path().join("run.conf");
    std::fs::write(&config, "seed = 4\ntrain_fraction = 0.1\nval_count = 5\n").unwrap();
    for method in ["gfhf", "llgc"] {
        let out = tmp.path().join(method);
        let status = std::process::Command::new(bin)
            .args(["baseline", "--method", method, "--config"])
            .arg(&config)
            .arg("--graph")
            .arg(&graph)
            .arg("--attrs")
            .arg(&attrs)
            .arg("--labels")
            .arg(&labels_path)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success(), "{method} failed");
        assert!(out.join("metrics.json").exists());
        assert!(out.join("predictions.tsv").exists());
        let metrics: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(out.join("metrics.json")).unwrap(),
        )
        .unwrap();
        let micro = metrics["micro_f1"].as_f64().unwrap();
        assert!(micro > 0.8, "{method} micro {micro}");
    }
}

// structure-label context sampling depends on the noise distribution;
// exercise the whole sampler path on a fixture large enough to be seen by
// every branch (keeps the acceptance target self-contained)
#[test]
fn sampler_smoke_on_sbm() {
    let (g, _, labels, split) = sbm_fixture(9);
    let dist = NoiseDistribution::from_graph(&g).unwrap();
    let mut f = LabelDistribution::uniform(g.node_count(), split.class_count);
    for &i in &split.train {
        f.set_one_hot(i, labels[i as usize].unwrap());
    }
    let phi = split.train_mask(g.node_count());
    let hard = sampler::hard_labels(f.rows());
    let idx = sampler::rebuild_label_index(&phi, &hard, split.class_count, &dist);
    let hp = Hyperparams {
        batch_size: 128,
        s_neg: 4,
        ..Hyperparams::default()
    };
    let mut rng = seeded_rng(9);
    let batch = sampler::sample_batch(&g, &idx, &hard, &dist, &hp, &mut rng);
    assert_eq!(batch.len(), 128 * 5);
    assert!(batch.iter().all(|p| (p.polarity == 1) || (p.polarity == -1)));
}
