//! Choose the rare-word threshold `n` and neighbour count `k` by grid
//! search, then cross-validate at the chosen point.

use wv_enrich::embedding::{train_skipgram, SkipgramParams};
use wv_enrich::harness::{render_table, run_cv_with, ExperimentConfig};
use wv_enrich::synthetic::SyntheticSpec;

fn main() -> wv_enrich::Result<()> {
    let corpus = SyntheticSpec::default().generate();
    let mut sentences: Vec<Vec<String>> =
        corpus.documents.iter().map(|d| d.tokens.clone()).collect();
    sentences.extend(corpus.unlabelled);
    let embedding = train_skipgram(
        &sentences,
        &SkipgramParams {
            dim: 50,
            epochs: 5,
            ..SkipgramParams::default()
        },
    )?;

    let cfg = ExperimentConfig {
        dataset: "synthetic".into(),
        n_range: Some(vec![1, 2, 3, 5]),
        k_range: Some(vec![1, 3, 5]),
        repeats: 3,
        ..ExperimentConfig::default()
    };
    let result = run_cv_with(&corpus.documents, &embedding, &cfg)?;
    print!("{}", render_table(&result));
    Ok(())
}
