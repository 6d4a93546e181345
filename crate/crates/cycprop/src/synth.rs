//! Synthetic planted-community fixtures: a stochastic block model with
//! class-indicative noisy attributes, used by the end-to-end tests, the
//! examples, and the sensitivity sweeps.

use crate::graph::{seeded_rng, Graph, RandomSource};
use crate::ingest::{AttributeMatrix, Labels};
use rand::RngExt;

#[derive(Debug, Clone)]
pub struct SbmSpec {
    pub nodes: usize,
    pub blocks: usize,
    pub p_in: f64,
    pub p_out: f64,
    /// Attribute columns per block; total attribute dim = blocks * this.
    pub attrs_per_block: usize,
    /// Standard deviation of the Gaussian attribute noise.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SbmSpec {
    fn default() -> Self {
        SbmSpec {
            nodes: 100,
            blocks: 2,
            p_in: 0.1,
            p_out: 0.005,
            attrs_per_block: 4,
            noise: 0.3,
            seed: 0,
        }
    }
}

fn normal(rng: &mut RandomSource) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Generate graph, attributes, and full ground-truth labels. Nodes are
/// assigned to blocks round-robin, so classes are balanced.
pub fn generate(spec: &SbmSpec) -> (Graph, AttributeMatrix, Labels) {
    let mut rng = seeded_rng(spec.seed);
    let n = spec.nodes;
    let block_of = |i: usize| i % spec.blocks;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if block_of(i) == block_of(j) {
                spec.p_in
            } else {
                spec.p_out
            };
            if rng.random::<f64>() < p {
                edges.push((i as u32, j as u32));
            }
        }
    }
    let graph = Graph::from_edge_list(&edges, n).expect("generated endpoints are in range");
    let m = spec.blocks * spec.attrs_per_block;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let b = block_of(i);
            (0..m)
                .map(|c| {
                    let signal = if c / spec.attrs_per_block == b { 1.0 } else { 0.0 };
                    signal + spec.noise * normal(&mut rng)
                })
                .collect()
        })
        .collect();
    let attrs = AttributeMatrix::from_dense(&rows);
    let labels: Labels = (0..n).map(|i| Some(block_of(i) as u32)).collect();
    (graph, attrs, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_balanced() {
        let spec = SbmSpec::default();
        let (g1, x1, l1) = generate(&spec);
        let (g2, x2, l2) = generate(&spec);
        assert_eq!(g1, g2);
        assert_eq!(x1, x2);
        assert_eq!(l1, l2);
        let zeros = l1.iter().filter(|l| **l == Some(0)).count();
        assert_eq!(zeros, 50);
    }

    #[test]
    fn communities_denser_inside() {
        let (g, _, labels) = generate(&SbmSpec::default());
        let mut intra = 0usize;
        let mut inter = 0usize;
        for (a, b) in g.canonical_edges() {
            if labels[a as usize] == labels[b as usize] {
                intra += 1;
            } else {
                inter += 1;
            }
        }
        assert!(intra > 3 * inter, "intra {intra} inter {inter}");
    }
}
