//! Tab-separated and JSON artifact writers shared by the CLI and examples.
//! All floating-point text uses the shortest round-trippable form so repeated
//! runs with the same seed produce byte-identical files.

use crate::encoder::EmbeddingMatrix;
use crate::metrics::MetricsReport;
use crate::propagation::LabelDistribution;
use crate::trainer::HistoryRecord;
use anyhow::{bail, Context, Result};
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

/// Write `node_id \t argmax \t p1,p2,...` per node.
pub fn write_predictions(path: &Path, f: &LabelDistribution) -> Result<()> {
    let mut out = String::new();
    for i in 0..f.node_count() as u32 {
        let row = f.row(i);
        let arg = crate::metrics::argmax(row);
        write!(out, "{i}\t{arg}\t").unwrap();
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Parse a predictions file back into `(node_id, argmax, distribution)` rows.
pub fn read_predictions(path: &Path) -> Result<Vec<(u32, u32, Vec<f64>)>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let mut parse = |what: &str| -> Result<&str> {
            fields.next().ok_or_else(|| {
                anyhow::anyhow!("{}:{}: missing {what}", path.display(), lineno + 1)
            })
        };
        let id: u32 = parse("node id")?.parse()?;
        let arg: u32 = parse("argmax")?.parse()?;
        let dist = parse("distribution")?
            .split(',')
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("{}:{}: bad distribution", path.display(), lineno + 1))?;
        rows.push((id, arg, dist));
    }
    if rows.is_empty() {
        bail!("{}: no prediction rows", path.display());
    }
    Ok(rows)
}

/// Write `node_id \t v1 \t v2 ...` per node.
pub fn write_embeddings(path: &Path, emb: &EmbeddingMatrix) -> Result<()> {
    let mut out = String::new();
    for i in 0..emb.node_count() as u32 {
        write!(out, "{i}").unwrap();
        for v in emb.row(i) {
            write!(out, "\t{v}").unwrap();
        }
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// One JSON object per outer iteration.
pub fn write_history(path: &Path, history: &[HistoryRecord]) -> Result<()> {
    let mut file =
        fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    for rec in history {
        serde_json::to_writer(&mut file, rec)?;
        file.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_metrics(path: &Path, report: &MetricsReport) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}
