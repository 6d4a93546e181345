//! Hard predictions and the micro/macro F1 evaluation report.

use crate::propagation::LabelDistribution;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("prediction/truth length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Evaluation summary; `per_class` is indexed by class id.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub per_class: Vec<ClassMetrics>,
    pub n_eval: usize,
    pub seed: u64,
    pub variant: String,
    pub config: serde_json::Value,
}

/// Index of the largest entry, ties to the lowest index.
pub fn argmax(row: &[f64]) -> u32 {
    let mut best = 0usize;
    for (k, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = k;
        }
    }
    best as u32
}

/// Argmax per row over the given nodes, ties to the lowest class index.
pub fn predict(f: &LabelDistribution, nodes: &[u32]) -> Vec<u32> {
    nodes.iter().map(|&i| argmax(f.row(i))).collect()
}

/// Multi-class micro/macro F1. A class with neither predictions nor true
/// members scores 0 by convention.
pub fn micro_macro_f1(
    pred: &[u32],
    truth: &[u32],
    class_count: usize,
) -> Result<(f64, f64, Vec<ClassMetrics>), MetricsError> {
    if pred.len() != truth.len() {
        return Err(MetricsError::LengthMismatch(pred.len(), truth.len()));
    }
    let mut tp = vec![0usize; class_count];
    let mut fp = vec![0usize; class_count];
    let mut fn_ = vec![0usize; class_count];
    for (&p, &t) in pred.iter().zip(truth) {
        if p == t {
            tp[p as usize] += 1;
        } else {
            fp[p as usize] += 1;
            fn_[t as usize] += 1;
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let per_class: Vec<ClassMetrics> = (0..class_count)
        .map(|k| {
            let precision = ratio(tp[k], tp[k] + fp[k]);
            let recall = ratio(tp[k], tp[k] + fn_[k]);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                precision,
                recall,
                f1,
            }
        })
        .collect();
    let tp_sum: usize = tp.iter().sum();
    let fp_sum: usize = fp.iter().sum();
    let fn_sum: usize = fn_.iter().sum();
    let micro = ratio(2 * tp_sum, 2 * tp_sum + fp_sum + fn_sum);
    let macro_ = per_class.iter().map(|c| c.f1).sum::<f64>() / class_count as f64;
    Ok((micro, macro_, per_class))
}

/// Evaluate hard predictions and wrap them in a report.
pub fn report(
    pred: &[u32],
    truth: &[u32],
    class_count: usize,
    seed: u64,
    variant: &str,
    config: serde_json::Value,
) -> Result<MetricsReport, MetricsError> {
    let (micro_f1, macro_f1, per_class) = micro_macro_f1(pred, truth, class_count)?;
    Ok(MetricsReport {
        micro_f1,
        macro_f1,
        per_class,
        n_eval: pred.len(),
        seed,
        variant: variant.to_string(),
        config,
    })
}
