//! Embedding-adaptive label propagation: Gaussian edge weights from
//! embeddings, proximal-gradient updates of the per-node label distributions
//! under simplex constraints, and the self-paced indicator update.

use crate::config::DeltaMode;
use crate::encoder::EmbeddingMatrix;
use crate::graph::Graph;
use rayon::prelude::*;
use thiserror::Error;

/// Floor for the entropy-gradient log and for the median-heuristic scale.
const LOG_CLAMP: f64 = 1e-12;
const DELTA_FLOOR: f64 = 1e-6;
const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PropError {
    #[error("row {0} is not on the probability simplex (min {1}, sum {2})")]
    InfeasibleRow(usize, f64, f64),
}

/// CSR graph with a Gaussian-kernel weight per stored edge.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    /// Length scale the weights were built with.
    pub delta: f64,
}

impl WeightedGraph {
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Neighbor ids and weights of `v`, aligned.
    pub fn edges(&self, v: u32) -> (&[u32], &[f64]) {
        let v = v as usize;
        let range = self.offsets[v]..self.offsets[v + 1];
        (&self.targets[range.clone()], &self.weights[range])
    }

    pub fn weight_between(&self, i: u32, j: u32) -> Option<f64> {
        let (nbrs, ws) = self.edges(i);
        nbrs.iter().position(|&t| t == j).map(|p| ws[p])
    }
}

/// Resolve the kernel scale: fixed, or the median of edge-wise distances with
/// a small floor.
fn resolve_delta(mode: DeltaMode, fixed: f64, edge_dists: &[f64]) -> f64 {
    match mode {
        DeltaMode::Fixed => fixed,
        DeltaMode::MedianHeuristic => {
            if edge_dists.is_empty() {
                return fixed.max(DELTA_FLOOR);
            }
            let mut d: Vec<f64> = edge_dists.to_vec();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mid = d.len() / 2;
            let median = if d.len() % 2 == 0 {
                0.5 * (d[mid - 1] + d[mid])
            } else {
                d[mid]
            };
            median.max(DELTA_FLOOR)
        }
    }
}

/// Gaussian edge weights `exp(-dist^2 / (2 delta^2))` on the existing edges of
/// `g`, from an arbitrary squared-distance function. Weights are computed once
/// per unordered pair, so symmetry is exact.
pub fn gaussian_weights(
    g: &Graph,
    sq_dist: impl Fn(u32, u32) -> f64 + Sync,
    mode: DeltaMode,
    fixed_delta: f64,
) -> WeightedGraph {
    let n = g.node_count();
    let pairs: Vec<(u32, u32)> = g.canonical_edges();
    let dists: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| sq_dist(i, j).sqrt())
        .collect();
    let delta = resolve_delta(mode, fixed_delta, &dists);
    let inv = 1.0 / (2.0 * delta * delta);
    // mirror each unordered weight into both CSR directions
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0usize);
    let mut targets = Vec::new();
    for v in 0..n as u32 {
        targets.extend_from_slice(g.neighbors(v));
        offsets.push(targets.len());
    }
    let mut weights = vec![0.0; targets.len()];
    let pos = |i: u32, j: u32| -> usize {
        let base = offsets[i as usize];
        base + g.neighbors(i).binary_search(&j).unwrap()
    };
    for (&(i, j), &d) in pairs.iter().zip(&dists) {
        let w = (-d * d * inv).exp();
        weights[pos(i, j)] = w;
        weights[pos(j, i)] = w;
    }
    WeightedGraph {
        n,
        offsets,
        targets,
        weights,
        delta,
    }
}

/// Edge weights from embedding rows.
pub fn compute_weights(
    emb: &EmbeddingMatrix,
    g: &Graph,
    mode: DeltaMode,
    fixed_delta: f64,
) -> WeightedGraph {
    gaussian_weights(g, |i, j| emb.sq_dist(i, j), mode, fixed_delta)
}

/// Row-stochastic n x K label-distribution matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDistribution {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl LabelDistribution {
    pub fn uniform(n: usize, k: usize) -> Self {
        LabelDistribution {
            n,
            k,
            data: vec![1.0 / k as f64; n * k],
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn class_count(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: u32) -> &[f64] {
        let i = i as usize;
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn row_mut(&mut self, i: u32) -> &mut [f64] {
        let i = i as usize;
        &mut self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.k)
    }

    pub fn set_one_hot(&mut self, i: u32, class: u32) {
        let row = self.row_mut(i);
        row.fill(0.0);
        row[class as usize] = 1.0;
    }

    fn check_feasible(&self) -> Result<(), PropError> {
        for (i, row) in self.rows().enumerate() {
            let min = row.iter().cloned().fold(f64::INFINITY, f64::min);
            let sum: f64 = row.iter().sum();
            if min < -FEASIBILITY_TOL || (sum - 1.0).abs() > FEASIBILITY_TOL {
                return Err(PropError::InfeasibleRow(i, min, sum));
            }
        }
        Ok(())
    }
}

/// Binary per-node reliability mask; training-labeled nodes are always set.
pub type IndicatorVector = Vec<bool>;

/// Shannon entropy of a simplex row, natural log, `0 * log 0 = 0`.
pub fn entropy(f: &[f64]) -> f64 {
    -f.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Euclidean projection onto the probability simplex.
pub fn simplex_project(z: &[f64]) -> Vec<f64> {
    let mut u = z.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut eta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let candidate = (1.0 - cum) / (j + 1) as f64;
        if uj + candidate > 0.0 {
            eta = candidate;
        }
    }
    z.iter().map(|&v| (v + eta).max(0.0)).collect()
}

/// The regularized propagation objective: smoothness over weighted edges plus
/// the label-fitness term, the indicator-gated entropy term, and the linear
/// self-paced reward.
pub fn lp_objective(
    f: &LabelDistribution,
    w: &WeightedGraph,
    y_class: &[Option<u32>],
    train_mask: &[bool],
    phi: &[bool],
    mu: f64,
    lambda: f64,
) -> Result<f64, PropError> {
    f.check_feasible()?;
    Ok(lp_objective_unchecked(
        f, w, y_class, train_mask, phi, mu, lambda,
    ))
}

/// The same sum without the simplex-feasibility precondition. Intended for
/// finite-difference oracles, where coordinate perturbations necessarily step
/// off the simplex.
#[allow(clippy::too_many_arguments)]
pub fn lp_objective_unchecked(
    f: &LabelDistribution,
    w: &WeightedGraph,
    y_class: &[Option<u32>],
    train_mask: &[bool],
    phi: &[bool],
    mu: f64,
    lambda: f64,
) -> f64 {
    let mut total = 0.0;
    for i in 0..f.n as u32 {
        let fi = f.row(i);
        let (nbrs, ws) = w.edges(i);
        for (&j, &s) in nbrs.iter().zip(ws) {
            let fj = f.row(j);
            let d2: f64 = fi.iter().zip(fj).map(|(a, b)| (a - b) * (a - b)).sum();
            total += s * d2;
        }
        if train_mask[i as usize] {
            let y = y_class[i as usize].expect("training node must be labeled") as usize;
            let d2: f64 = fi
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let t = if k == y { 1.0 } else { 0.0 };
                    (v - t) * (v - t)
                })
                .sum();
            total += mu * d2;
        }
        if phi[i as usize] {
            total += entropy(fi) - lambda;
        }
    }
    total
}

/// Gradient of the objective with respect to row `i`. The entropy log is
/// clamped near the simplex boundary.
pub fn lp_gradient(
    f: &LabelDistribution,
    w: &WeightedGraph,
    y_class: &[Option<u32>],
    train_mask: &[bool],
    phi: &[bool],
    mu: f64,
    i: u32,
) -> Vec<f64> {
    let fi = f.row(i);
    let k = f.k;
    let mut grad = vec![0.0; k];
    let (nbrs, ws) = w.edges(i);
    // The smoothness sum visits each undirected edge from both endpoints, so
    // the true per-row derivative carries twice the single-edge coefficient.
    for (&j, &s) in nbrs.iter().zip(ws) {
        let fj = f.row(j);
        for c in 0..k {
            grad[c] += 4.0 * s * (fi[c] - fj[c]);
        }
    }
    if train_mask[i as usize] {
        let y = y_class[i as usize].expect("training node must be labeled") as usize;
        for c in 0..k {
            let t = if c == y { 1.0 } else { 0.0 };
            grad[c] += 2.0 * mu * (fi[c] - t);
        }
    }
    if phi[i as usize] {
        for c in 0..k {
            grad[c] -= fi[c].max(LOG_CLAMP).ln() + 1.0;
        }
    }
    grad
}

/// One synchronous proximal-gradient sweep: every row steps against the
/// pre-step matrix, then projects back onto the simplex.
pub fn lp_step(
    f: &LabelDistribution,
    w: &WeightedGraph,
    y_class: &[Option<u32>],
    train_mask: &[bool],
    phi: &[bool],
    mu: f64,
    lr: f64,
) -> LabelDistribution {
    let k = f.k;
    let rows: Vec<Vec<f64>> = (0..f.n as u32)
        .into_par_iter()
        .map(|i| {
            let grad = lp_gradient(f, w, y_class, train_mask, phi, mu, i);
            let z: Vec<f64> = f
                .row(i)
                .iter()
                .zip(&grad)
                .map(|(&v, &g)| v - lr * g)
                .collect();
            simplex_project(&z)
        })
        .collect();
    let mut out = LabelDistribution::uniform(f.n, k);
    for (i, row) in rows.into_iter().enumerate() {
        out.row_mut(i as u32).copy_from_slice(&row);
    }
    out
}

/// Self-paced indicator: set where row entropy is at most `lambda`, forced on
/// for training-labeled nodes.
pub fn update_indicator(
    f: &LabelDistribution,
    lambda: f64,
    train_mask: &[bool],
) -> IndicatorVector {
    (0..f.n as u32)
        .map(|i| train_mask[i as usize] || entropy(f.row(i)) <= lambda)
        .collect()
}
