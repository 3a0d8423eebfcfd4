use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::cv::{EvalResult, Significance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    /// Human-readable results table.
    #[default]
    TableText,
    /// One JSON object per (repeat, fold) cell.
    Records,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table-text" | "table" | "text" => Ok(ReportFormat::TableText),
            "records" => Ok(ReportFormat::Records),
            other => Err(Error::InvalidArgument(format!(
                "unknown report format {other:?} (expected table-text or records)"
            ))),
        }
    }
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.2}%"))
}

fn p_value(s: &Significance) -> String {
    match s {
        Significance::Tested(r) if r.p_two_sided >= 1e-3 => format!("{:.4}", r.p_two_sided),
        Significance::Tested(r) => format!("{:.3e}", r.p_two_sided),
        Significance::NoDifference => "no-diff".to_string(),
    }
}

/// Results table: recalls to three decimals, error reductions to two.
pub fn render_table(r: &EvalResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {}x{}-fold cross validation, seed {}, top-{} evaluation",
        r.repeats, r.folds, r.seed, r.top_k
    );
    let _ = writeln!(
        out,
        "# fold seed {}, embedding seed {}",
        r.fold_seed,
        r.embedding_seed
            .map_or_else(|| "n/a (loaded model)".to_string(), |s| s.to_string())
    );
    if let Some(g) = &r.grid {
        let _ = writeln!(
            out,
            "# (n, k) = ({}, {}) chosen by grid search over {} points on the test split of repeat 0, fold 0; that split is also part of the averages below",
            g.best.n,
            g.best.k,
            g.scores.len()
        );
        for (n, k, micro) in &g.scores {
            let _ = writeln!(out, "# grid n={n} k={k} micro={micro:.4}");
        }
    }
    let header = [
        "Model", "n", "k", "Micro Base", "Micro WV", "Micro ErrRed", "Micro p", "Macro Base",
        "Macro WV", "Macro ErrRed", "Macro p",
    ];
    let row = [
        r.classifier.name().to_string(),
        r.enrichment.n.to_string(),
        r.enrichment.k.to_string(),
        format!("{:.3}", r.baseline.micro),
        format!("{:.3}", r.enriched.micro),
        pct(r.micro_error_reduction),
        p_value(&r.micro_significance),
        format!("{:.3}", r.baseline.macro_),
        format!("{:.3}", r.enriched.macro_),
        pct(r.macro_error_reduction),
        p_value(&r.macro_significance),
    ];
    let widths: Vec<usize> = header
        .iter()
        .zip(&row)
        .map(|(h, v)| h.len().max(v.len()))
        .collect();
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        cells
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let _ = writeln!(out, "{}", line(&mut header.iter().copied()));
    let _ = writeln!(out, "{}", line(&mut row.iter().map(String::as_str)));
    out
}

#[derive(Serialize)]
struct CellRecord<'a> {
    repeat: usize,
    fold: usize,
    test_size: usize,
    classifier: &'a str,
    n: u64,
    k: usize,
    top_k: usize,
    baseline_micro: f64,
    baseline_macro: f64,
    enriched_micro: f64,
    enriched_macro: f64,
}

/// One JSON line per cell.
pub fn render_records(r: &EvalResult) -> Result<String> {
    let mut out = String::new();
    for c in &r.cells {
        let rec = CellRecord {
            repeat: c.repeat,
            fold: c.fold,
            test_size: c.test_size,
            classifier: r.classifier.name(),
            n: r.enrichment.n,
            k: r.enrichment.k,
            top_k: r.top_k,
            baseline_micro: c.baseline.micro,
            baseline_macro: c.baseline.macro_,
            enriched_micro: c.enriched.micro,
            enriched_macro: c.enriched.macro_,
        };
        out.push_str(&serde_json::to_string(&rec)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn render(r: &EvalResult, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::TableText => Ok(render_table(r)),
        ReportFormat::Records => render_records(r),
    }
}

/// Write a report to `path`, creating parent directories.
pub fn emit_report(r: &EvalResult, format: ReportFormat, path: &Path) -> Result<()> {
    let text = render(r, format)?;
    super::cv::ensure_parent(path)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
