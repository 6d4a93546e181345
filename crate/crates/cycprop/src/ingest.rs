//! Dataset loading from on-disk text formats plus seeded label splits.
//!
//! Formats:
//! - graph file: one edge per line, `src<TAB>dst`; `#` comments ignored.
//! - attribute file: `node_id<TAB>col:val col:val ...` (sparse) or
//!   `node_id<TAB>v1,v2,...` (dense); auto-detected from the first data line.
//! - label file: `node_id<TAB>class_id`, 0-based dense class ids.

use crate::graph::{seeded_rng, Graph, GraphError};
use rand::seq::SliceRandom;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: parse error: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("consistency: {0}")]
    Inconsistent(String),
    #[error("split: {0}")]
    Split(String),
}

/// Sparse n x m node-attribute matrix; rows are sorted `(column, value)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeMatrix {
    m: usize,
    rows: Vec<Vec<(u32, f64)>>,
}

impl AttributeMatrix {
    pub fn new(rows: Vec<Vec<(u32, f64)>>, m: usize) -> Self {
        let mut rows = rows;
        for row in &mut rows {
            row.sort_unstable_by_key(|&(c, _)| c);
        }
        AttributeMatrix { m, rows }
    }

    /// Dense rows, mostly for fixtures.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let m = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(c, &v)| (c as u32, v))
                    .collect()
            })
            .collect();
        AttributeMatrix { m, rows }
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    pub fn attr_count(&self) -> usize {
        self.m
    }

    pub fn row(&self, i: u32) -> &[(u32, f64)] {
        &self.rows[i as usize]
    }

    /// Squared Euclidean distance between two rows (sparse merge).
    pub fn sq_dist(&self, i: u32, j: u32) -> f64 {
        let (a, b) = (self.row(i), self.row(j));
        let (mut p, mut q) = (0usize, 0usize);
        let mut acc = 0.0;
        while p < a.len() && q < b.len() {
            match a[p].0.cmp(&b[q].0) {
                std::cmp::Ordering::Less => {
                    acc += a[p].1 * a[p].1;
                    p += 1;
                }
                std::cmp::Ordering::Greater => {
                    acc += b[q].1 * b[q].1;
                    q += 1;
                }
                std::cmp::Ordering::Equal => {
                    let d = a[p].1 - b[q].1;
                    acc += d * d;
                    p += 1;
                    q += 1;
                }
            }
        }
        acc += a[p..].iter().map(|&(_, v)| v * v).sum::<f64>();
        acc += b[q..].iter().map(|&(_, v)| v * v).sum::<f64>();
        acc
    }

    /// L2-normalize every row in place; zero rows are left unchanged.
    pub fn l2_normalize_rows(&mut self) {
        for row in &mut self.rows {
            let norm = row.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                for entry in row.iter_mut() {
                    entry.1 /= norm;
                }
            }
        }
    }
}

/// Seeded partition of the labeled nodes.
#[derive(Debug, Clone)]
pub struct LabelSplit {
    pub train: Vec<u32>,
    pub val: Vec<u32>,
    pub test: Vec<u32>,
    pub class_count: usize,
}

impl LabelSplit {
    pub fn train_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &i in &self.train {
            mask[i as usize] = true;
        }
        mask
    }
}

/// Per-node class labels; `None` for unlabeled nodes.
pub type Labels = Vec<Option<u32>>;

fn read_file(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> IngestError {
    IngestError::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Load a full dataset. Node ids must be dense integers `[0, n)` where `n` is
/// one past the largest id seen across the three files; every labeled node and
/// every attribute row must name a valid node.
pub fn load_dataset(
    graph_path: &Path,
    attr_path: &Path,
    label_path: &Path,
) -> Result<(Graph, AttributeMatrix, Labels), IngestError> {
    let graph_text = read_file(graph_path)?;
    let mut edges = Vec::new();
    let mut max_id = 0u32;
    for (line, l) in data_lines(&graph_text) {
        let mut it = l.split_whitespace();
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(parse_err(graph_path, line, "expected 'src<TAB>dst'")),
        };
        let a: u32 = a
            .parse()
            .map_err(|e| parse_err(graph_path, line, format!("bad node id '{a}': {e}")))?;
        let b: u32 = b
            .parse()
            .map_err(|e| parse_err(graph_path, line, format!("bad node id '{b}': {e}")))?;
        max_id = max_id.max(a).max(b);
        edges.push((a, b));
    }

    let attr_text = read_file(attr_path)?;
    let mut attr_rows: BTreeMap<u32, Vec<(u32, f64)>> = BTreeMap::new();
    let mut m = 0usize;
    for (line, l) in data_lines(&attr_text) {
        let (id, rest) = l
            .split_once(char::is_whitespace)
            .ok_or_else(|| parse_err(attr_path, line, "expected 'node_id<TAB>attributes'"))?;
        let id: u32 = id
            .parse()
            .map_err(|e| parse_err(attr_path, line, format!("bad node id '{id}': {e}")))?;
        let rest = rest.trim();
        let mut row = Vec::new();
        if rest.contains(':') {
            // sparse: col:val pairs
            for tok in rest.split_whitespace() {
                let (c, v) = tok
                    .split_once(':')
                    .ok_or_else(|| parse_err(attr_path, line, format!("bad 'col:val' token '{tok}'")))?;
                let c: u32 = c
                    .parse()
                    .map_err(|e| parse_err(attr_path, line, format!("bad column '{c}': {e}")))?;
                let v: f64 = v
                    .parse()
                    .map_err(|e| parse_err(attr_path, line, format!("bad value '{v}': {e}")))?;
                if !v.is_finite() {
                    return Err(parse_err(attr_path, line, format!("non-finite value '{v}'")));
                }
                m = m.max(c as usize + 1);
                row.push((c, v));
            }
        } else {
            // dense: comma-separated values
            for (c, tok) in rest.split(',').enumerate() {
                let v: f64 = tok
                    .trim()
                    .parse()
                    .map_err(|e| parse_err(attr_path, line, format!("bad value '{tok}': {e}")))?;
                if !v.is_finite() {
                    return Err(parse_err(attr_path, line, format!("non-finite value '{tok}'")));
                }
                m = m.max(c + 1);
                if v != 0.0 {
                    row.push((c as u32, v));
                }
            }
        }
        max_id = max_id.max(id);
        if attr_rows.insert(id, row).is_some() {
            return Err(parse_err(attr_path, line, format!("duplicate row for node {id}")));
        }
    }

    let label_text = read_file(label_path)?;
    let mut label_pairs = Vec::new();
    for (line, l) in data_lines(&label_text) {
        let mut it = l.split_whitespace();
        let (id, cls) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(parse_err(label_path, line, "expected 'node_id<TAB>class_id'")),
        };
        let id: u32 = id
            .parse()
            .map_err(|e| parse_err(label_path, line, format!("bad node id '{id}': {e}")))?;
        let cls: u32 = cls
            .parse()
            .map_err(|e| parse_err(label_path, line, format!("bad class id '{cls}': {e}")))?;
        max_id = max_id.max(id);
        label_pairs.push((id, cls));
    }

    let n = max_id as usize + 1;
    let graph = Graph::from_edge_list(&edges, n)?;
    let mut rows = vec![Vec::new(); n];
    for (id, row) in attr_rows {
        rows[id as usize] = row;
    }
    let attrs = AttributeMatrix::new(rows, m);
    let mut labels: Labels = vec![None; n];
    for (id, cls) in label_pairs {
        if labels[id as usize].replace(cls).is_some() {
            return Err(IngestError::Inconsistent(format!(
                "node {id} appears twice in the label file"
            )));
        }
    }
    Ok((graph, attrs, labels))
}

/// Load a label file on its own: `node_id<TAB>class_id` per line.
pub fn load_label_pairs(path: &Path) -> Result<Vec<(u32, u32)>, IngestError> {
    let text = read_file(path)?;
    let mut pairs = Vec::new();
    for (line, l) in data_lines(&text) {
        let mut it = l.split_whitespace();
        let (id, cls) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(parse_err(path, line, "expected 'node_id<TAB>class_id'")),
        };
        let id: u32 = id
            .parse()
            .map_err(|e| parse_err(path, line, format!("bad node id '{id}': {e}")))?;
        let cls: u32 = cls
            .parse()
            .map_err(|e| parse_err(path, line, format!("bad class id '{cls}': {e}")))?;
        pairs.push((id, cls));
    }
    Ok(pairs)
}

/// Number of distinct classes (labels are 0-based dense).
pub fn class_count(labels: &Labels) -> usize {
    labels
        .iter()
        .flatten()
        .map(|&c| c as usize + 1)
        .max()
        .unwrap_or(0)
}

/// Draw a seeded train/validation/test partition of the labeled nodes.
/// `|train| = round(train_fraction * n_labeled)`, `|val| = val_count`, and the
/// remaining labeled nodes form the test set.
pub fn split_labels(
    labels: &Labels,
    train_fraction: f64,
    val_count: usize,
    seed: u64,
) -> Result<LabelSplit, IngestError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(IngestError::Split(format!(
            "train_fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let mut labeled: Vec<u32> = labels
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.map(|_| i as u32))
        .collect();
    let n_labeled = labeled.len();
    let n_train = (train_fraction * n_labeled as f64).round() as usize;
    if n_train == 0 || n_train + val_count >= n_labeled {
        return Err(IngestError::Split(format!(
            "cannot split {n_labeled} labeled nodes into {n_train} train + {val_count} val + a non-empty test set"
        )));
    }
    let mut rng = seeded_rng(seed);
    labeled.shuffle(&mut rng);
    let train = labeled[..n_train].to_vec();
    let val = labeled[n_train..n_train + val_count].to_vec();
    let test = labeled[n_train + val_count..].to_vec();
    Ok(LabelSplit {
        train,
        val,
        test,
        class_count: class_count(labels),
    })
}

/// Serialize a dataset back to the canonical file texts
/// (graph, attributes in sparse form, labels). Used by fixtures and tests.
pub fn canonical_texts(g: &Graph, x: &AttributeMatrix, labels: &Labels) -> (String, String, String) {
    let mut gs = String::new();
    for (a, b) in g.canonical_edges() {
        writeln!(gs, "{a}\t{b}").unwrap();
    }
    let mut xs = String::new();
    for i in 0..x.node_count() as u32 {
        let row = x.row(i);
        let body: Vec<String> = row.iter().map(|(c, v)| format!("{c}:{v}")).collect();
        writeln!(xs, "{i}\t{}", body.join(" ")).unwrap();
    }
    let mut ls = String::new();
    for (i, l) in labels.iter().enumerate() {
        if let Some(c) = l {
            writeln!(ls, "{i}\t{c}").unwrap();
        }
    }
    (gs, xs, ls)
}
