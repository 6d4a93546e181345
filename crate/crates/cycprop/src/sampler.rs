//! Structure-label-aware graph context sampling.
//!
//! Each positive anchor takes the structure branch with probability `r`
//! (positive drawn uniformly from the anchor's neighborhood, negatives from
//! the degree-weighted noise distribution) and the label branch otherwise
//! (anchor and positive share a hard label among indicator-marked candidates,
//! negatives come from differently labeled candidates with noise weights
//! restricted to that pool and renormalized).

use crate::config::Hyperparams;
use crate::graph::{Graph, NoiseDistribution, RandomSource};
use rand::RngExt;

/// A single `(anchor, context, polarity)` sample; polarity is +1 or -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContextPair {
    pub anchor: u32,
    pub context: u32,
    pub polarity: i8,
}

/// Per-class candidate pools over nodes with a set indicator bit, plus
/// cumulative noise weights for restricted negative sampling.
#[derive(Debug, Clone)]
pub struct LabelContextIndex {
    classes: Vec<Vec<u32>>,
    // cumulative degree^(3/4) weights per class, aligned with `classes`
    cum_weights: Vec<Vec<f64>>,
    class_totals: Vec<f64>,
    candidates: Vec<u32>,
}

impl LabelContextIndex {
    pub fn class_members(&self, k: usize) -> &[u32] {
        &self.classes[k]
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// Group indicator-marked nodes by their current hard label.
pub fn rebuild_label_index(
    phi: &[bool],
    hard_labels: &[u32],
    class_count: usize,
    dist: &NoiseDistribution,
) -> LabelContextIndex {
    let mut classes = vec![Vec::new(); class_count];
    let mut candidates = Vec::new();
    for (i, &flag) in phi.iter().enumerate() {
        if flag {
            let v = i as u32;
            classes[hard_labels[i] as usize].push(v);
            candidates.push(v);
        }
    }
    let mut cum_weights = Vec::with_capacity(class_count);
    let mut class_totals = Vec::with_capacity(class_count);
    for members in &classes {
        let mut cum = Vec::with_capacity(members.len());
        let mut acc = 0.0;
        for &v in members {
            acc += dist.weight(v);
            cum.push(acc);
        }
        class_totals.push(acc);
        cum_weights.push(cum);
    }
    LabelContextIndex {
        classes,
        cum_weights,
        class_totals,
        candidates,
    }
}

/// Hard labels as the argmax of each distribution row, ties to the lowest
/// class index.
pub fn hard_labels(rows: impl Iterator<Item = impl AsRef<[f64]>>) -> Vec<u32> {
    rows.map(|row| {
        let row = row.as_ref();
        let mut best = 0usize;
        for (k, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = k;
            }
        }
        best as u32
    })
    .collect()
}

const LABEL_BRANCH_RETRIES: usize = 8;

fn structure_anchor(
    g: &Graph,
    dist: &NoiseDistribution,
    s_neg: usize,
    rng: &mut RandomSource,
    out: &mut Vec<ContextPair>,
) {
    let pool = g.non_isolated();
    let anchor = pool[rng.random_range(0..pool.len())];
    let nbrs = g.neighbors(anchor);
    let context = nbrs[rng.random_range(0..nbrs.len())];
    out.push(ContextPair {
        anchor,
        context,
        polarity: 1,
    });
    for _ in 0..s_neg {
        out.push(ContextPair {
            anchor,
            context: dist.sample(rng),
            polarity: -1,
        });
    }
}

// Weighted draw from the complement of class `k`: pick a class proportional to
// its total weight, then binary-search its cumulative array.
fn negative_from_complement(
    idx: &LabelContextIndex,
    k: usize,
    rng: &mut RandomSource,
) -> Option<u32> {
    let total: f64 = idx
        .class_totals
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != k)
        .map(|(_, w)| w)
        .sum();
    if total <= 0.0 {
        return None;
    }
    let mut t = rng.random::<f64>() * total;
    for (c, &w) in idx.class_totals.iter().enumerate() {
        if c == k || w <= 0.0 {
            continue;
        }
        if t < w {
            let cum = &idx.cum_weights[c];
            let pos = cum.partition_point(|&acc| acc <= t);
            return Some(idx.classes[c][pos.min(cum.len() - 1)]);
        }
        t -= w;
    }
    // numeric fallthrough: last nonempty complement class
    idx.classes
        .iter()
        .enumerate()
        .rev()
        .find(|&(c, members)| c != k && !members.is_empty())
        .map(|(_, members)| *members.last().unwrap())
}

fn label_anchor(
    idx: &LabelContextIndex,
    hard: &[u32],
    s_neg: usize,
    rng: &mut RandomSource,
    out: &mut Vec<ContextPair>,
) -> bool {
    for _ in 0..LABEL_BRANCH_RETRIES {
        if idx.candidates.is_empty() {
            return false;
        }
        let anchor = idx.candidates[rng.random_range(0..idx.candidates.len())];
        let k = hard[anchor as usize] as usize;
        let members = &idx.classes[k];
        if members.len() < 2 {
            continue; // positive pool is the anchor alone
        }
        // uniform positive from the same class, excluding the anchor
        let anchor_pos = members.iter().position(|&v| v == anchor).unwrap();
        let mut pick = rng.random_range(0..members.len() - 1);
        if pick >= anchor_pos {
            pick += 1;
        }
        let positive = members[pick];

        let mut negatives = Vec::with_capacity(s_neg);
        let mut ok = true;
        for _ in 0..s_neg {
            match negative_from_complement(idx, k, rng) {
                Some(c) => negatives.push(c),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        out.push(ContextPair {
            anchor,
            context: positive,
            polarity: 1,
        });
        for c in negatives {
            out.push(ContextPair {
                anchor,
                context: c,
                polarity: -1,
            });
        }
        return true;
    }
    false
}

/// Draw `batch_size` positive anchors, each with `s_neg` negatives.
/// Degenerate label-branch pools fall back to the structure branch after a
/// bounded number of retries.
pub fn sample_batch(
    g: &Graph,
    idx: &LabelContextIndex,
    hard: &[u32],
    dist: &NoiseDistribution,
    hp: &Hyperparams,
    rng: &mut RandomSource,
) -> Vec<ContextPair> {
    let mut out = Vec::with_capacity(hp.batch_size * (hp.s_neg + 1));
    for _ in 0..hp.batch_size {
        let rnd: f64 = rng.random();
        if rnd < hp.r {
            structure_anchor(g, dist, hp.s_neg, rng, &mut out);
        } else if !label_anchor(idx, hard, hp.s_neg, rng, &mut out) {
            structure_anchor(g, dist, hp.s_neg, rng, &mut out);
        }
    }
    out
}
