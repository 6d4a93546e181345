//! Two-hop neighborhood-aggregating node encoder with a negative-sampling
//! context loss and hand-written gradients.
//!
//! Layer 1 maps `[x_v ; mean of sampled neighbors' x]` through a ReLU into the
//! hidden space; layer 2 maps `[h1_v ; mean of sampled neighbors' h1]` into the
//! embedding space, again with ReLU, followed by L2 normalization (zero rows
//! pass through unchanged). Training samples fixed-size neighborhoods with
//! replacement when the degree falls short; evaluation uses full
//! neighborhoods so embeddings are deterministic.

use crate::graph::{seeded_rng, Graph, RandomSource};
use crate::ingest::AttributeMatrix;
use crate::sampler::ContextPair;
use rand::RngExt;
use rayon::prelude::*;
use std::collections::{HashMap, HashSet};
use thiserror::Error;

const SIGMA_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EncoderError {
    #[error("non-finite gradient encountered (batch loss {loss}); lower lr_enc")]
    NonFiniteGradient { loss: f64 },
}

/// Parameters of the two-layer aggregating encoder.
///
/// `w1` is `hidden x 2m` row-major (self columns first, neighbor-mean columns
/// second), `w2` is `d x 2*hidden` row-major.
#[derive(Debug, Clone)]
pub struct EncoderParams {
    pub m: usize,
    pub hidden: usize,
    pub d: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl EncoderParams {
    /// Glorot-style uniform initialization, deterministic per seed.
    pub fn init(m: usize, hidden: usize, d: usize, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let layer = |rows: usize, cols: usize, rng: &mut RandomSource| {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            (0..rows * cols)
                .map(|_| rng.random_range(-limit..limit))
                .collect::<Vec<f64>>()
        };
        EncoderParams {
            m,
            hidden,
            d,
            w1: layer(hidden, 2 * m, &mut rng),
            b1: vec![0.0; hidden],
            w2: layer(d, 2 * hidden, &mut rng),
            b2: vec![0.0; d],
        }
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// Flattened view in a fixed order (w1, b1, w2, b2); used by the
    /// finite-difference tests.
    pub fn get_flat(&self, i: usize) -> f64 {
        let mut i = i;
        for part in [&self.w1, &self.b1, &self.w2, &self.b2] {
            if i < part.len() {
                return part[i];
            }
            i -= part.len();
        }
        panic!("flat index out of range");
    }

    pub fn set_flat(&mut self, i: usize, v: f64) {
        let mut i = i;
        for part in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2] {
            if i < part.len() {
                part[i] = v;
                return;
            }
            i -= part.len();
        }
        panic!("flat index out of range");
    }
}

/// Gradient buffer with the same shapes as [`EncoderParams`].
#[derive(Debug, Clone)]
pub struct EncoderGrads {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl EncoderGrads {
    fn zeros(p: &EncoderParams) -> Self {
        EncoderGrads {
            w1: vec![0.0; p.w1.len()],
            b1: vec![0.0; p.b1.len()],
            w2: vec![0.0; p.w2.len()],
            b2: vec![0.0; p.b2.len()],
        }
    }

    pub fn get_flat(&self, i: usize) -> f64 {
        let mut i = i;
        for part in [&self.w1, &self.b1, &self.w2, &self.b2] {
            if i < part.len() {
                return part[i];
            }
            i -= part.len();
        }
        panic!("flat index out of range");
    }

    fn is_finite(&self) -> bool {
        [&self.w1, &self.b1, &self.w2, &self.b2]
            .iter()
            .all(|p| p.iter().all(|v| v.is_finite()))
    }

}

/// Dense n x d embedding matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn zeros(n: usize, d: usize) -> Self {
        EmbeddingMatrix {
            n,
            d,
            data: vec![0.0; n * d],
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: u32) -> &[f64] {
        let i = i as usize;
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn row_mut(&mut self, i: u32) -> &mut [f64] {
        let i = i as usize;
        &mut self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn sq_dist(&self, i: u32, j: u32) -> f64 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// Fixed per-node neighbor lists for one batch (or for deterministic
/// evaluation). Every node that needs a hidden representation has an entry.
#[derive(Debug, Clone)]
pub struct NeighborPlan {
    samples: HashMap<u32, Vec<u32>>,
}

impl NeighborPlan {
    /// Sampled neighborhoods for `seeds` and for every node those samples pull
    /// in. Fixed size `sample_size`, with replacement when the degree is
    /// smaller; isolated nodes get an empty list.
    pub fn sampled(g: &Graph, seeds: &[u32], sample_size: usize, rng: &mut RandomSource) -> Self {
        let mut samples: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut frontier: Vec<u32> = seeds.to_vec();
        frontier.sort_unstable();
        frontier.dedup();
        let mut second_hop: Vec<u32> = Vec::new();
        for &v in &frontier {
            let s = sample_neighbors(g, v, sample_size, rng);
            second_hop.extend_from_slice(&s);
            samples.insert(v, s);
        }
        second_hop.sort_unstable();
        second_hop.dedup();
        for v in second_hop {
            samples
                .entry(v)
                .or_insert_with(|| sample_neighbors(g, v, sample_size, rng));
        }
        NeighborPlan { samples }
    }

    /// Full neighborhoods for `seeds` and their neighbors (deterministic mode).
    pub fn full(g: &Graph, seeds: &[u32]) -> Self {
        let mut samples: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut frontier: Vec<u32> = seeds.to_vec();
        frontier.sort_unstable();
        frontier.dedup();
        let mut second_hop: Vec<u32> = Vec::new();
        for &v in &frontier {
            let s = g.neighbors(v).to_vec();
            second_hop.extend_from_slice(&s);
            samples.insert(v, s);
        }
        second_hop.sort_unstable();
        second_hop.dedup();
        for v in second_hop {
            samples.entry(v).or_insert_with(|| g.neighbors(v).to_vec());
        }
        NeighborPlan { samples }
    }

    fn neighbors_of(&self, v: u32) -> &[u32] {
        self.samples
            .get(&v)
            .map(|s| s.as_slice())
            .unwrap_or(&[])
    }
}

fn sample_neighbors(g: &Graph, v: u32, size: usize, rng: &mut RandomSource) -> Vec<u32> {
    let nbrs = g.neighbors(v);
    if nbrs.is_empty() {
        return Vec::new();
    }
    if nbrs.len() <= size {
        if nbrs.len() == size {
            return nbrs.to_vec();
        }
        // degree < sample size: draw with replacement to a fixed size
        return (0..size)
            .map(|_| nbrs[rng.random_range(0..nbrs.len())])
            .collect();
    }
    // without replacement via partial Fisher-Yates over indices
    let mut idx: Vec<usize> = (0..nbrs.len()).collect();
    for i in 0..size {
        let j = rng.random_range(i..idx.len());
        idx.swap(i, j);
    }
    idx[..size].iter().map(|&i| nbrs[i]).collect()
}

struct H1Cache {
    a1: Vec<f64>,
    xmean: Vec<(u32, f64)>,
}

struct EmbCache {
    hmean: Vec<f64>,
    a2: Vec<f64>,
    e: Vec<f64>,
    norm: f64,
}

fn sparse_mean(x: &AttributeMatrix, nodes: &[u32]) -> Vec<(u32, f64)> {
    if nodes.is_empty() {
        return Vec::new();
    }
    let mut acc: HashMap<u32, f64> = HashMap::new();
    for &u in nodes {
        for &(c, v) in x.row(u) {
            *acc.entry(c).or_insert(0.0) += v;
        }
    }
    let scale = 1.0 / nodes.len() as f64;
    let mut out: Vec<(u32, f64)> = acc.into_iter().map(|(c, v)| (c, v * scale)).collect();
    out.sort_unstable_by_key(|&(c, _)| c);
    out
}

fn layer1_forward(p: &EncoderParams, x: &AttributeMatrix, v: u32, plan: &NeighborPlan) -> H1Cache {
    let xmean = sparse_mean(x, plan.neighbors_of(v));
    let xself = x.row(v);
    let m2 = 2 * p.m;
    let mut a1 = vec![0.0; p.hidden];
    for h in 0..p.hidden {
        let row = &p.w1[h * m2..(h + 1) * m2];
        let mut z = p.b1[h];
        for &(c, val) in xself {
            z += row[c as usize] * val;
        }
        for &(c, val) in &xmean {
            z += row[p.m + c as usize] * val;
        }
        a1[h] = if z > 0.0 { z } else { 0.0 };
    }
    H1Cache { a1, xmean }
}

fn layer2_forward(
    p: &EncoderParams,
    v: u32,
    plan: &NeighborPlan,
    h1: &HashMap<u32, H1Cache>,
) -> EmbCache {
    let nbrs = plan.neighbors_of(v);
    let mut hmean = vec![0.0; p.hidden];
    if !nbrs.is_empty() {
        for &u in nbrs {
            for (acc, x) in hmean.iter_mut().zip(&h1[&u].a1) {
                *acc += x;
            }
        }
        let scale = 1.0 / nbrs.len() as f64;
        for acc in &mut hmean {
            *acc *= scale;
        }
    }
    let hself = &h1[&v].a1;
    let h2 = 2 * p.hidden;
    let mut a2 = vec![0.0; p.d];
    for k in 0..p.d {
        let row = &p.w2[k * h2..(k + 1) * h2];
        let mut z = p.b2[k];
        for (w, x) in row[..p.hidden].iter().zip(hself) {
            z += w * x;
        }
        for (w, x) in row[p.hidden..].iter().zip(&hmean) {
            z += w * x;
        }
        a2[k] = if z > 0.0 { z } else { 0.0 };
    }
    let norm = a2.iter().map(|v| v * v).sum::<f64>().sqrt();
    let e = if norm > 0.0 {
        a2.iter().map(|v| v / norm).collect()
    } else {
        a2.clone()
    };
    EmbCache { hmean, a2, e, norm }
}

fn forward_nodes(
    p: &EncoderParams,
    x: &AttributeMatrix,
    plan: &NeighborPlan,
    nodes: &[u32],
) -> (HashMap<u32, H1Cache>, HashMap<u32, EmbCache>) {
    let mut h1_nodes: HashSet<u32> = HashSet::new();
    for &v in nodes {
        h1_nodes.insert(v);
        h1_nodes.extend(plan.neighbors_of(v).iter().copied());
    }
    let h1_list: Vec<u32> = h1_nodes.into_iter().collect();
    let h1: HashMap<u32, H1Cache> = h1_list
        .par_iter()
        .map(|&v| (v, layer1_forward(p, x, v, plan)))
        .collect();
    let emb: HashMap<u32, EmbCache> = nodes
        .par_iter()
        .map(|&v| (v, layer2_forward(p, v, plan, &h1)))
        .collect();
    (h1, emb)
}

/// Embed one node. Deterministic mode (`rng = None`) uses full
/// neighborhoods; otherwise neighborhoods are sampled at `sample_size`.
pub fn embed_node(
    p: &EncoderParams,
    g: &Graph,
    x: &AttributeMatrix,
    v: u32,
    sample_size: usize,
    rng: Option<&mut RandomSource>,
) -> Vec<f64> {
    let plan = match rng {
        Some(rng) => NeighborPlan::sampled(g, &[v], sample_size, rng),
        None => NeighborPlan::full(g, &[v]),
    };
    let (_, emb) = forward_nodes(p, x, &plan, &[v]);
    emb.into_iter().next().unwrap().1.e
}

/// Embed every node with full neighborhoods (deterministic).
pub fn embed_all(p: &EncoderParams, g: &Graph, x: &AttributeMatrix) -> EmbeddingMatrix {
    let n = g.node_count();
    let plan = NeighborPlan::full(g, &(0..n as u32).collect::<Vec<_>>());
    let h1: Vec<H1Cache> = (0..n as u32)
        .into_par_iter()
        .map(|v| layer1_forward(p, x, v, &plan))
        .collect();
    let h1_map: HashMap<u32, H1Cache> = h1.into_iter().enumerate().map(|(i, c)| (i as u32, c)).collect();
    let rows: Vec<Vec<f64>> = (0..n as u32)
        .into_par_iter()
        .map(|v| layer2_forward(p, v, &plan, &h1_map).e)
        .collect();
    let mut out = EmbeddingMatrix::zeros(n, p.d);
    for (i, row) in rows.into_iter().enumerate() {
        out.row_mut(i as u32).copy_from_slice(&row);
    }
    out
}

fn pair_loss(score: f64, polarity: i8) -> f64 {
    let s = sigmoid(polarity as f64 * score).clamp(SIGMA_EPS, 1.0 - SIGMA_EPS);
    -s.ln()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean negative log-sigmoid context loss over already-computed embeddings.
pub fn context_loss(emb: &EmbeddingMatrix, pairs: &[ContextPair]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    pairs
        .iter()
        .map(|p| pair_loss(dot(emb.row(p.context), emb.row(p.anchor)), p.polarity))
        .sum::<f64>()
        / pairs.len() as f64
}

fn batch_nodes(pairs: &[ContextPair]) -> Vec<u32> {
    let mut nodes: Vec<u32> = pairs
        .iter()
        .flat_map(|p| [p.anchor, p.context])
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

/// Batch context loss under a fixed neighborhood plan.
pub fn batch_loss(
    p: &EncoderParams,
    x: &AttributeMatrix,
    plan: &NeighborPlan,
    pairs: &[ContextPair],
) -> f64 {
    let nodes = batch_nodes(pairs);
    let (_, emb) = forward_nodes(p, x, plan, &nodes);
    pairs
        .iter()
        .map(|pr| pair_loss(dot(&emb[&pr.context].e, &emb[&pr.anchor].e), pr.polarity))
        .sum::<f64>()
        / pairs.len() as f64
}

/// Batch context loss and its gradient with respect to every encoder
/// parameter, under a fixed neighborhood plan. Gradients flow through both
/// sides of every pair, the normalization, both ReLU layers, and the
/// neighbor means.
pub fn batch_gradient(
    p: &EncoderParams,
    x: &AttributeMatrix,
    plan: &NeighborPlan,
    pairs: &[ContextPair],
) -> (f64, EncoderGrads) {
    let nodes = batch_nodes(pairs);
    let (h1, emb) = forward_nodes(p, x, plan, &nodes);
    let scale = 1.0 / pairs.len() as f64;

    // loss and d(loss)/d(e_v) accumulation
    let mut loss = 0.0;
    let mut ge: HashMap<u32, Vec<f64>> = HashMap::new();
    for pr in pairs {
        let ea = &emb[&pr.anchor].e;
        let ec = &emb[&pr.context].e;
        let score = dot(ec, ea);
        loss += pair_loss(score, pr.polarity);
        let gamma = pr.polarity as f64;
        // d(-log sigma(gamma * s))/ds
        let gs = -gamma * (1.0 - sigmoid(gamma * score)) * scale;
        let ga = ge.entry(pr.anchor).or_insert_with(|| vec![0.0; p.d]);
        for (g, c) in ga.iter_mut().zip(ec) {
            *g += gs * c;
        }
        let gc = ge.entry(pr.context).or_insert_with(|| vec![0.0; p.d]);
        for (g, a) in gc.iter_mut().zip(ea) {
            *g += gs * a;
        }
    }
    loss *= scale;

    let mut grads = EncoderGrads::zeros(p);
    let mut gh1: HashMap<u32, Vec<f64>> = HashMap::new();
    let h2 = 2 * p.hidden;
    // accumulate in sorted node order so float sums are reproducible
    let mut ge_nodes: Vec<u32> = ge.keys().copied().collect();
    ge_nodes.sort_unstable();
    for &v in &ge_nodes {
        let ge_v = &ge[&v];
        let cache = &emb[&v];
        // back through L2 normalization (identity for the zero-vector guard)
        let mut ga2 = vec![0.0; p.d];
        if cache.norm > 0.0 {
            let proj = dot(&cache.e, ge_v);
            for k in 0..p.d {
                ga2[k] = (ge_v[k] - cache.e[k] * proj) / cache.norm;
            }
        } else {
            ga2.copy_from_slice(ge_v);
        }
        // back through ReLU
        for k in 0..p.d {
            if cache.a2[k] <= 0.0 {
                ga2[k] = 0.0;
            }
        }
        // layer-2 weight/bias grads and input grads
        let hself = &h1[&v].a1;
        let nbrs = plan.neighbors_of(v);
        let inv = if nbrs.is_empty() {
            0.0
        } else {
            1.0 / nbrs.len() as f64
        };
        let mut gu = vec![0.0; h2];
        for k in 0..p.d {
            let gz = ga2[k];
            if gz == 0.0 {
                continue;
            }
            grads.b2[k] += gz;
            let wrow = &p.w2[k * h2..(k + 1) * h2];
            let grow = &mut grads.w2[k * h2..(k + 1) * h2];
            for j in 0..p.hidden {
                grow[j] += gz * hself[j];
                grow[p.hidden + j] += gz * cache.hmean[j];
                gu[j] += gz * wrow[j];
                gu[p.hidden + j] += gz * wrow[p.hidden + j];
            }
        }
        let entry = gh1.entry(v).or_insert_with(|| vec![0.0; p.hidden]);
        for j in 0..p.hidden {
            entry[j] += gu[j];
        }
        if inv > 0.0 {
            for &u in nbrs {
                let entry = gh1.entry(u).or_insert_with(|| vec![0.0; p.hidden]);
                for j in 0..p.hidden {
                    entry[j] += gu[p.hidden + j] * inv;
                }
            }
        }
    }

    // layer-1 backward for every node holding hidden-state gradient
    let m2 = 2 * p.m;
    let mut gh1_nodes: Vec<u32> = gh1.keys().copied().collect();
    gh1_nodes.sort_unstable();
    for &u in &gh1_nodes {
        let gh = &gh1[&u];
        let cache = &h1[&u];
        let xself = x.row(u);
        for j in 0..p.hidden {
            let gz = if cache.a1[j] > 0.0 { gh[j] } else { 0.0 };
            if gz == 0.0 {
                continue;
            }
            grads.b1[j] += gz;
            let grow = &mut grads.w1[j * m2..(j + 1) * m2];
            for &(c, val) in xself {
                grow[c as usize] += gz * val;
            }
            for &(c, val) in &cache.xmean {
                grow[p.m + c as usize] += gz * val;
            }
        }
    }

    (loss, grads)
}

/// One stochastic gradient step on a sampled batch. Neighborhoods are sampled
/// once per step at `sample_size`. Returns the batch loss before the update.
pub fn train_step(
    p: &mut EncoderParams,
    g: &Graph,
    x: &AttributeMatrix,
    pairs: &[ContextPair],
    sample_size: usize,
    lr: f64,
    rng: &mut RandomSource,
) -> Result<f64, EncoderError> {
    let nodes = batch_nodes(pairs);
    let plan = NeighborPlan::sampled(g, &nodes, sample_size, rng);
    let (loss, grads) = batch_gradient(p, x, &plan, pairs);
    if !grads.is_finite() || !loss.is_finite() {
        return Err(EncoderError::NonFiniteGradient { loss });
    }
    apply_update(p, &grads, lr);
    Ok(loss)
}

pub fn apply_update(p: &mut EncoderParams, grads: &EncoderGrads, lr: f64) {
    for (w, g) in [
        (&mut p.w1, &grads.w1),
        (&mut p.b1, &grads.b1),
        (&mut p.w2, &grads.w2),
        (&mut p.b2, &grads.b2),
    ] {
        for (x, y) in w.iter_mut().zip(g) {
            *x -= lr * y;
        }
    }
}
