//! Baseline against enriched classification under repeated k-fold
//! cross-validation, on a synthetic corpus with a domain-trained embedding.
//!
//! ```bash
//! cargo run --release --example cross_validation -- [mnb|svm]
//! ```

use wv_enrich::embedding::{train_skipgram, SkipgramParams};
use wv_enrich::harness::{render_table, run_cv_with, ClassifierKind, ExperimentConfig};
use wv_enrich::synthetic::SyntheticSpec;

fn main() -> wv_enrich::Result<()> {
    let classifier = std::env::args()
        .nth(1)
        .map_or(Ok(ClassifierKind::Mnb), |s| s.parse())?;
    let corpus = SyntheticSpec::default().generate();

    let mut sentences: Vec<Vec<String>> =
        corpus.documents.iter().map(|d| d.tokens.clone()).collect();
    sentences.extend(corpus.unlabelled.iter().cloned());
    let params = SkipgramParams {
        dim: 50,
        epochs: 5,
        ..SkipgramParams::default()
    };
    let embedding = train_skipgram(&sentences, &params)?;

    let cfg = ExperimentConfig {
        dataset: "synthetic".into(),
        classifier,
        n: 2,
        k: 3,
        repeats: 5,
        folds: 10,
        ..ExperimentConfig::default()
    };
    let result = run_cv_with(&corpus.documents, &embedding, &cfg)?;
    print!("{}", render_table(&result));
    Ok(())
}
