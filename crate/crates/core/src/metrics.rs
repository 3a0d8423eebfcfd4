//! Recall measures, error reduction and the Wilcoxon signed-rank test.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Per-class instance and true-positive counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionTally {
    classes: BTreeMap<String, ClassCount>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCount {
    pub instances: u64,
    pub true_positives: u64,
}

impl ConfusionTally {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record one instance of `class`, correct or not.
    pub fn record(&mut self, class: &str, correct: bool) {
        let entry = self.classes.entry(class.to_string()).or_default();
        entry.instances += 1;
        entry.true_positives += u64::from(correct);
    }

    /// Make `class` known without adding instances.
    pub fn register(&mut self, class: &str) {
        self.classes.entry(class.to_string()).or_default();
    }

    pub fn classes(&self) -> impl Iterator<Item = (&str, ClassCount)> {
        self.classes.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn total(&self) -> u64 {
        self.classes.values().map(|c| c.instances).sum()
    }

    pub fn correct(&self) -> u64 {
        self.classes.values().map(|c| c.true_positives).sum()
    }

    pub fn merge(&mut self, other: &ConfusionTally) {
        for (k, v) in &other.classes {
            let e = self.classes.entry(k.clone()).or_default();
            e.instances += v.instances;
            e.true_positives += v.true_positives;
        }
    }
}

/// Tally predictions against gold label sets.
///
/// Each instance is counted under `eval_class[i]`; it is a true positive
/// when the prediction is any of its gold labels.
pub fn tally<G, L, P, E>(gold: &[G], predicted: &[P], eval_class: &[E]) -> Result<ConfusionTally>
where
    G: AsRef<[L]>,
    L: AsRef<str>,
    P: AsRef<str>,
    E: AsRef<str>,
{
    if gold.len() != predicted.len() || gold.len() != eval_class.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} gold, {} predicted, {} classes",
            gold.len(),
            predicted.len(),
            eval_class.len()
        )));
    }
    let mut t = ConfusionTally::new();
    for ((g, p), c) in gold.iter().zip(predicted).zip(eval_class) {
        let correct = g.as_ref().iter().any(|l| l.as_ref() == p.as_ref());
        t.record(c.as_ref(), correct);
    }
    Ok(t)
}

/// Aggregate recall: all true positives over all instances.
pub fn micro_recall(t: &ConfusionTally) -> Result<f64> {
    let total = t.total();
    if total == 0 {
        return Err(Error::InvalidArgument("micro recall of an empty tally".into()));
    }
    Ok(t.correct() as f64 / total as f64)
}

/// Unweighted mean of class recalls over classes with at least one instance.
pub fn macro_recall(t: &ConfusionTally) -> Result<f64> {
    let recalls: Vec<f64> = t
        .classes
        .values()
        .filter(|c| c.instances > 0)
        .map(|c| c.true_positives as f64 / c.instances as f64)
        .collect();
    if recalls.is_empty() {
        return Err(Error::InvalidArgument("macro recall needs a populated class".into()));
    }
    Ok(recalls.iter().sum::<f64>() / recalls.len() as f64)
}

/// Relative reduction of the error `1 - recall`, as a percentage.
pub fn error_reduction(baseline: f64, treatment: f64) -> Result<f64> {
    if baseline >= 1.0 {
        return Err(Error::InvalidArgument(
            "error reduction is undefined for a perfect baseline".into(),
        ));
    }
    Ok(100.0 * (treatment - baseline) / (1.0 - baseline))
}

/// Outcome of a two-sided Wilcoxon signed-rank test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Sum of ranks of positive differences (treatment above baseline).
    pub w_plus: f64,
    pub p_two_sided: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub exact: bool,
}

/// Largest non-zero sample size that gets the exact null distribution.
pub const EXACT_LIMIT: usize = 20;

const DIFF_GRID: f64 = 1e12;

/// How the null distribution of W+ is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WilcoxonMethod {
    /// Exact up to [`EXACT_LIMIT`] non-zero pairs, normal beyond.
    #[default]
    Auto,
    Exact,
    /// Normal approximation with tie and continuity corrections.
    Normal,
}

/// Wilcoxon signed-rank test on `treatment - baseline` differences.
///
/// Zero differences are dropped and tied magnitudes get average ranks. Up to
/// [`EXACT_LIMIT`] pairs the two-sided p-value is exact over all `2^n` sign
/// assignments; above that a normal approximation with tie and continuity
/// corrections is used.
pub fn wilcoxon_signed_rank(baseline: &[f64], treatment: &[f64]) -> Result<WilcoxonResult> {
    wilcoxon_signed_rank_with(baseline, treatment, WilcoxonMethod::Auto)
}

pub fn wilcoxon_signed_rank_with(
    baseline: &[f64],
    treatment: &[f64],
    method: WilcoxonMethod,
) -> Result<WilcoxonResult> {
    if baseline.len() != treatment.len() || baseline.is_empty() {
        return Err(Error::InvalidArgument(
            "paired samples must be non-empty and of equal length".into(),
        ));
    }
    // Differences are snapped to a 1e-12 grid so that equal differences of
    // recall-like values tie despite rounding in the subtraction.
    let diffs: Vec<f64> = treatment
        .iter()
        .zip(baseline)
        .map(|(t, b)| ((t - b) * DIFF_GRID).round() / DIFF_GRID)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Err(Error::NoDifference);
    }
    let ranks = average_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let n = diffs.len();
    let exact = match method {
        WilcoxonMethod::Auto => n <= EXACT_LIMIT,
        WilcoxonMethod::Exact => true,
        WilcoxonMethod::Normal => false,
    };
    let (p, exact) = if exact {
        (exact_p(&ranks, w_plus), true)
    } else {
        (normal_p(&ranks, w_plus), false)
    };
    Ok(WilcoxonResult {
        w_plus,
        p_two_sided: p,
        n,
        exact,
    })
}

/// 1-based ranks with ties sharing their average rank.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

/// Exact two-sided p-value from the distribution of W+ over all sign
/// patterns. Ranks are multiples of 1/2, so doubled ranks index a counting
/// table.
fn exact_p(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut ways = vec![0f64; max + 1];
    ways[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if ways[s] > 0.0 {
                ways[s + r] += ways[s];
            }
        }
        reach += r;
    }
    let total = 2f64.powi(ranks.len() as i32);
    let w = (w_plus * 2.0).round() as usize;
    let lower: f64 = ways[..=w].iter().sum::<f64>() / total;
    let upper: f64 = ways[w..].iter().sum::<f64>() / total;
    (2.0 * lower.min(upper)).min(1.0)
}

fn normal_p(ranks: &[f64], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let std_normal = Normal::new(0.0, 1.0).expect("valid parameters");
    (2.0 * (1.0 - std_normal.cdf(z))).min(1.0)
}
