//! Tabular output: records.csv, summary.csv, summary.json, f1_vs_n.csv.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};

use crate::run::{RunRecord, SummaryRow, SweepRow};

fn num(v: f64) -> String {
    // shortest round-trip form keeps the files byte-stable across runs
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_records_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record([
        "seed",
        "method",
        "wall_time_s",
        "precision",
        "recall",
        "f1",
        "tp",
        "fp",
        "fn",
        "degenerate",
        "shd",
        "nshd",
        "sid_low",
        "sid_high",
        "nsid_low",
        "nsid_high",
        "extensions_used",
        "sid_computed",
        "iterations",
        "converged",
    ])?;
    for r in records {
        w.write_record([
            r.seed.to_string(),
            r.method.to_string(),
            num(r.wall_time_s),
            num(r.skeleton.precision),
            num(r.skeleton.recall),
            num(r.skeleton.f1),
            r.skeleton.tp.to_string(),
            r.skeleton.fp.to_string(),
            r.skeleton.fn_.to_string(),
            r.skeleton.degenerate.to_string(),
            r.shd.to_string(),
            num(r.nshd),
            opt(r.sid.map(|b| b.low as f64)),
            opt(r.sid.map(|b| b.high as f64)),
            opt(r.nsid.map(|b| b.0)),
            opt(r.nsid.map(|b| b.1)),
            opt(r.sid.map(|b| b.extensions_used as f64)),
            r.sid.is_some().to_string(),
            r.iterations.to_string(),
            r.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    // std is the population form (divide by n)
    w.write_record(["method", "metric", "mean", "std_population", "count"])?;
    for r in rows {
        w.write_record([
            r.method.to_string(),
            r.metric.clone(),
            num(r.mean),
            num(r.std),
            r.count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_json(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut by_method: BTreeMap<String, BTreeMap<String, serde_json::Value>> = BTreeMap::new();
    for r in rows {
        by_method.entry(r.method.to_string()).or_default().insert(
            r.metric.clone(),
            serde_json::json!({ "mean": r.mean, "std": r.std, "count": r.count }),
        );
    }
    let text = serde_json::to_string_pretty(&by_method)?;
    std::fs::write(path, text + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_f1_vs_n_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["size", "method", "mean_f1", "std_f1"])?;
    for r in rows {
        w.write_record([
            r.size.to_string(),
            r.method.to_string(),
            num(r.mean_f1),
            num(r.std_f1),
        ])?;
    }
    w.flush()?;
    Ok(())
}
