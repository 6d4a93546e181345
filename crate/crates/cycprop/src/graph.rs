//! Immutable sparse graph storage (CSR), the degree-based noise distribution
//! used for negative sampling, and the seeded random source shared by all
//! stochastic components.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Deterministic, seedable generator. Identical seeds produce identical
/// sample streams; parallel workers each own an independently seeded source.
pub type RandomSource = ChaCha8Rng;

/// Build a [`RandomSource`] from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> RandomSource {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) has an endpoint outside [0, {2})")]
    EndpointOutOfRange(u64, u64, usize),
    #[error("graph has no edges; noise distribution is undefined")]
    NoEdges,
}

/// Undirected simple graph in compressed sparse row form.
///
/// Self-loops are dropped and duplicate edges merged at construction, so the
/// adjacency is symmetric and every stored edge appears in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    non_isolated: Vec<u32>,
}

impl Graph {
    /// Canonicalize an edge list: endpoints are validated against `n`,
    /// self-loops dropped, duplicates (including both orientations of the
    /// same pair) merged.
    pub fn from_edge_list(edges: &[(u32, u32)], n: usize) -> Result<Self, GraphError> {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(a, b) in edges {
            if (a as usize) >= n || (b as usize) >= n {
                return Err(GraphError::EndpointOutOfRange(a as u64, b as u64, n));
            }
            if a == b {
                continue;
            }
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0usize);
        let mut targets = Vec::new();
        let mut non_isolated = Vec::new();
        for (i, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if !list.is_empty() {
                non_isolated.push(i as u32);
            }
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Ok(Graph {
            n,
            offsets,
            targets,
            non_isolated,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: u32) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Nodes with degree at least one, ascending.
    pub fn non_isolated(&self) -> &[u32] {
        &self.non_isolated
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v as u32)).collect()
    }

    /// The canonical undirected edge list (i < j, ascending).
    pub fn canonical_edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.n as u32 {
            for &j in self.neighbors(i) {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Alias table over strictly positive weights: O(1) draws.
#[derive(Debug, Clone)]
struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    fn new(weights: &[f64]) -> Self {
        let n = weights.len();
        let total: f64 = weights.iter().sum();
        let mut prob: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let mut small: Vec<usize> = Vec::new();
        let mut large: Vec<usize> = Vec::new();
        for (i, &p) in prob.iter().enumerate() {
            if p < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(s), Some(l)) = (small.pop(), large.pop()) {
            alias[s] = l as u32;
            prob[l] -= 1.0 - prob[s];
            if prob[l] < 1.0 {
                small.push(l);
            } else {
                large.push(l);
            }
        }
        for i in large.into_iter().chain(small) {
            prob[i] = 1.0;
        }
        AliasTable { prob, alias }
    }

    fn sample(&self, rng: &mut RandomSource) -> usize {
        let i = rng.random_range(0..self.prob.len());
        if rng.random::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i] as usize
        }
    }
}

/// Degree-weighted noise distribution for negative sampling: node `v` is drawn
/// with probability proportional to `degree(v)^(3/4)`. Isolated nodes have
/// probability zero.
#[derive(Debug, Clone)]
pub struct NoiseDistribution {
    support: Vec<u32>,
    table: AliasTable,
    node_weight: Vec<f64>,
    total_weight: f64,
}

impl NoiseDistribution {
    pub fn from_graph(g: &Graph) -> Result<Self, GraphError> {
        let node_weight: Vec<f64> = (0..g.node_count() as u32)
            .map(|v| (g.degree(v) as f64).powf(0.75))
            .collect();
        let support: Vec<u32> = (0..g.node_count() as u32)
            .filter(|&v| node_weight[v as usize] > 0.0)
            .collect();
        if support.is_empty() {
            return Err(GraphError::NoEdges);
        }
        let support_weights: Vec<f64> = support.iter().map(|&v| node_weight[v as usize]).collect();
        let total_weight: f64 = support_weights.iter().sum();
        Ok(NoiseDistribution {
            table: AliasTable::new(&support_weights),
            support,
            node_weight,
            total_weight,
        })
    }

    /// Exact sampling probability of node `v`.
    pub fn probability(&self, v: u32) -> f64 {
        self.node_weight[v as usize] / self.total_weight
    }

    /// Unnormalized weight `degree(v)^(3/4)`; used to restrict the
    /// distribution to candidate pools.
    pub fn weight(&self, v: u32) -> f64 {
        self.node_weight[v as usize]
    }

    pub fn sample(&self, rng: &mut RandomSource) -> u32 {
        self.support[self.table.sample(rng)]
    }
}
