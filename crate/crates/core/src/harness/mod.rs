//! Experiment orchestration: repeated k-fold cross-validation of baseline
//! against enriched classification, `(n, k)` grid search, significance
//! testing and report emission.
//!
//! Within a cell the classifier is trained once on raw training vectors and
//! scores the test split twice, once per arm. Cells run in parallel; every
//! source of randomness derives from the configured master seed.

mod config;
mod cv;
mod report;

pub use config::{parse_range_list, ClassifierKind, EmbeddingSource, ExperimentConfig};
pub use cv::{
    grid_search, plan_for, run_cv, run_cv_with, train_domain_embedding, CellResult, EvalResult,
    Experiment, GridOutcome, PreparedCell, Recall, Significance,
};
pub use report::{emit_report, render, render_records, render_table, ReportFormat};
