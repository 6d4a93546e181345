//! The joint cyclic training loop: alternate encoder steps and propagation
//! steps, recompute edge weights from fresh embeddings, grow the self-paced
//! threshold, and stop on a validation plateau. Also hosts the two ablation
//! variants (propagation-only and encoder-only).

use crate::config::{DeltaMode, Hyperparams, Variant};
use crate::encoder::{self, EmbeddingMatrix, EncoderParams};
use crate::graph::{seeded_rng, Graph, NoiseDistribution, RandomSource};
use crate::ingest::{AttributeMatrix, LabelSplit, Labels};
use crate::metrics::{micro_macro_f1, predict};
use crate::propagation::{
    self, compute_weights, gaussian_weights, lp_objective, lp_step, update_indicator,
    LabelDistribution, WeightedGraph,
};
use crate::sampler::{hard_labels, rebuild_label_index, sample_batch};
use rand::RngExt;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("graph error: {0}")]
    Graph(#[from] crate::graph::GraphError),
}

/// One outer-iteration record of the training history.
#[derive(Debug, Clone, Serialize)]
pub struct HistoryRecord {
    pub iter: usize,
    pub l_lp: f64,
    pub l_ge: f64,
    pub l_total: f64,
    pub val_micro_f1: f64,
    pub phi_count: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone)]
struct Snapshot {
    f: LabelDistribution,
    embeddings: EmbeddingMatrix,
    metric: f64,
    iter: usize,
}

/// Mutable state of a run.
pub struct TrainState {
    pub params: EncoderParams,
    pub f: LabelDistribution,
    pub phi: Vec<bool>,
    pub lambda: f64,
    pub iter: usize,
    pub history: Vec<HistoryRecord>,
    best: Option<Snapshot>,
    rng: RandomSource,
}

/// Final artifacts of a run: embeddings, label distributions, history, and
/// the iteration the returned snapshot came from.
pub struct TrainResult {
    pub embeddings: EmbeddingMatrix,
    pub f: LabelDistribution,
    pub history: Vec<HistoryRecord>,
    pub selected_iter: usize,
    /// Set when the run aborted on a non-finite loss.
    pub diagnostics: Option<String>,
}

/// Initialize the loop state: random encoder parameters, one-hot rows for
/// training nodes, uniform rows elsewhere, indicator on the training mask.
pub fn initialize(
    x: &AttributeMatrix,
    labels: &Labels,
    split: &LabelSplit,
    hp: &Hyperparams,
    n: usize,
) -> TrainState {
    let k = split.class_count;
    let mut f = LabelDistribution::uniform(n, k);
    for &i in &split.train {
        f.set_one_hot(i, labels[i as usize].expect("train node must be labeled"));
    }
    let phi = split.train_mask(n);
    TrainState {
        params: EncoderParams::init(x.attr_count(), hp.hidden_dim, hp.dim, hp.seed),
        f,
        phi,
        lambda: hp.lambda0,
        iter: 0,
        history: Vec::new(),
        best: None,
        rng: seeded_rng(hp.seed.wrapping_add(0x9e37_79b9)),
    }
}

/// Validation plateau test: true when the metric has not improved by more
/// than `1e-4` for `patience` consecutive outer iterations.
pub fn converged(history: &[HistoryRecord], patience: usize) -> bool {
    if patience == 0 {
        return !history.is_empty();
    }
    let mut best = f64::NEG_INFINITY;
    let mut since = 0usize;
    for rec in history {
        if rec.val_micro_f1 > best + 1e-4 {
            best = rec.val_micro_f1;
            since = 0;
        } else {
            since += 1;
        }
    }
    since >= patience
}

fn val_metric(f: &LabelDistribution, labels: &Labels, split: &LabelSplit) -> f64 {
    if split.val.is_empty() {
        return 0.0;
    }
    let pred = predict(f, &split.val);
    let truth: Vec<u32> = split
        .val
        .iter()
        .map(|&i| labels[i as usize].expect("validation node must be labeled"))
        .collect();
    micro_macro_f1(&pred, &truth, split.class_count)
        .map(|(micro, _, _)| micro)
        .unwrap_or(0.0)
}

// One-vs-rest logistic head over embeddings for the encoder-only variant:
// per-class binary regression via batch gradient descent, scores normalized
// into a distribution row.
fn logistic_head(
    emb: &EmbeddingMatrix,
    labels: &Labels,
    split: &LabelSplit,
    seed: u64,
) -> LabelDistribution {
    let n = emb.node_count();
    let d = emb.dim();
    let k = split.class_count;
    let mut rng = seeded_rng(seed);
    let train = &split.train;
    let epochs = 200;
    let lr = 0.5;
    let l2 = 1e-4;
    let mut weights = vec![vec![0.0f64; d + 1]; k];
    for w in &mut weights {
        for v in w.iter_mut() {
            *v = rng.random_range(-0.01..0.01);
        }
    }
    let sigmoid = |x: f64| 1.0 / (1.0 + (-x).exp());
    for _ in 0..epochs {
        for (c, w) in weights.iter_mut().enumerate() {
            let mut grad = vec![0.0f64; d + 1];
            for &i in train {
                let target = if labels[i as usize] == Some(c as u32) {
                    1.0
                } else {
                    0.0
                };
                let row = emb.row(i);
                let z = w[d] + row.iter().zip(&w[..d]).map(|(x, wi)| x * wi).sum::<f64>();
                let err = sigmoid(z) - target;
                for (gi, x) in grad[..d].iter_mut().zip(row) {
                    *gi += err * x;
                }
                grad[d] += err;
            }
            let scale = lr / train.len() as f64;
            for (wi, gi) in w.iter_mut().zip(&grad) {
                *wi -= scale * gi + lr * l2 * *wi;
            }
        }
    }
    let mut f = LabelDistribution::uniform(n, k);
    for i in 0..n as u32 {
        let row = emb.row(i);
        let mut scores = vec![0.0; k];
        for (c, w) in weights.iter().enumerate() {
            let z = w[d] + row.iter().zip(&w[..d]).map(|(x, wi)| x * wi).sum::<f64>();
            scores[c] = sigmoid(z);
        }
        let sum: f64 = scores.iter().sum();
        let out = f.row_mut(i);
        if sum > 0.0 {
            for (o, s) in out.iter_mut().zip(&scores) {
                *o = s / sum;
            }
        }
    }
    f
}

fn propagation_only_weights(g: &Graph, x: &AttributeMatrix) -> WeightedGraph {
    gaussian_weights(g, |i, j| x.sq_dist(i, j), DeltaMode::MedianHeuristic, 0.1)
}

/// Run the joint loop to convergence and return the best-validation snapshot.
pub fn run(
    mut state: TrainState,
    g: &Graph,
    x: &AttributeMatrix,
    labels: &Labels,
    split: &LabelSplit,
    hp: &Hyperparams,
) -> Result<TrainResult, TrainError> {
    let n = g.node_count();
    let k = split.class_count;
    let train_mask = split.train_mask(n);
    let lambda_cap = hp.lambda_cap_for(k);
    let needs_encoder = hp.variant != Variant::LpOnly;
    let needs_lp = hp.variant != Variant::GnnOnly;
    let noise = if needs_encoder {
        Some(NoiseDistribution::from_graph(g)?)
    } else {
        None
    };
    // propagation-only: raw-attribute weights, computed once
    let static_weights = if hp.variant == Variant::LpOnly {
        Some(propagation_only_weights(g, x))
    } else {
        None
    };
    let mut embeddings = EmbeddingMatrix::zeros(n, hp.dim);
    let mut diagnostics = None;

    'outer: for iter in 0..hp.max_outer_iters {
        state.iter = iter;
        let mut l_ge = 0.0;
        if needs_encoder {
            let noise = noise.as_ref().unwrap();
            let hard = hard_labels(state.f.rows());
            let idx = rebuild_label_index(&state.phi, &hard, k, noise);
            let mut acc = 0.0;
            for _ in 0..hp.t1 {
                let batch = sample_batch(g, &idx, &hard, noise, hp, &mut state.rng);
                match encoder::train_step(
                    &mut state.params,
                    g,
                    x,
                    &batch,
                    hp.neighbor_sample_size,
                    hp.lr_enc,
                    &mut state.rng,
                ) {
                    Ok(loss) => acc += loss,
                    Err(e) => {
                        diagnostics = Some(format!("outer iteration {iter}: {e}"));
                        break 'outer;
                    }
                }
            }
            l_ge = acc / hp.t1 as f64;
        }

        let weights = match hp.variant {
            Variant::LpOnly => static_weights.clone().unwrap(),
            _ => {
                embeddings = encoder::embed_all(&state.params, g, x);
                compute_weights(&embeddings, g, hp.delta_mode, hp.delta)
            }
        };

        if needs_lp {
            for _ in 0..hp.t2 {
                state.f = lp_step(
                    &state.f,
                    &weights,
                    labels,
                    &train_mask,
                    &state.phi,
                    hp.mu,
                    hp.lr_lp,
                );
            }
            state.phi = update_indicator(&state.f, state.lambda, &train_mask);
            state.lambda = (state.lambda * hp.lambda_growth).min(lambda_cap);
        } else {
            state.f = logistic_head(&embeddings, labels, split, hp.seed.wrapping_add(iter as u64));
        }

        let l_lp = lp_objective(
            &state.f,
            &weights,
            labels,
            &train_mask,
            &state.phi,
            hp.mu,
            state.lambda,
        )
        .unwrap_or(f64::NAN);
        let l_total = l_lp + hp.alpha * l_ge;
        if !l_total.is_finite() {
            diagnostics = Some(format!(
                "outer iteration {iter}: non-finite combined loss (l_lp {l_lp}, l_ge {l_ge})"
            ));
            break;
        }
        let metric = val_metric(&state.f, labels, split);
        state.history.push(HistoryRecord {
            iter,
            l_lp,
            l_ge,
            l_total,
            val_micro_f1: metric,
            phi_count: state.phi.iter().filter(|&&b| b).count(),
            lambda: state.lambda,
        });
        // ties keep the later iterate: propagation keeps refining F while the
        // (small) validation set saturates
        let better = state.best.as_ref().map_or(true, |b| metric >= b.metric);
        if better {
            state.best = Some(Snapshot {
                f: state.f.clone(),
                embeddings: embeddings.clone(),
                metric,
                iter,
            });
        }
        if converged(&state.history, hp.patience) {
            break;
        }
    }

    let (f, embeddings, selected_iter) = match state.best {
        Some(snap) => (snap.f, snap.embeddings, snap.iter),
        None => (state.f, embeddings, 0),
    };
    Ok(TrainResult {
        embeddings,
        f,
        history: state.history,
        selected_iter,
        diagnostics,
    })
}

/// Convenience wrapper: initialize and run in one call.
pub fn train(
    g: &Graph,
    x: &AttributeMatrix,
    labels: &Labels,
    split: &LabelSplit,
    hp: &Hyperparams,
) -> Result<TrainResult, TrainError> {
    let state = initialize(x, labels, split, hp, g.node_count());
    run(state, g, x, labels, split, hp)
}

/// Test accuracy helper used by the CLI and the sweep harness.
pub fn test_metrics(
    f: &LabelDistribution,
    labels: &Labels,
    split: &LabelSplit,
) -> (f64, f64, Vec<crate::metrics::ClassMetrics>) {
    let pred = predict(f, &split.test);
    let truth: Vec<u32> = split
        .test
        .iter()
        .map(|&i| labels[i as usize].expect("test node must be labeled"))
        .collect();
    micro_macro_f1(&pred, &truth, split.class_count).expect("aligned lengths")
}

// re-export for callers that only need entropy-based diagnostics
pub use propagation::entropy as row_entropy;
