//! Train a skip-gram embedding, save it in word2vec text format and query
//! nearest neighbours from the reloaded copy.
//!
//! ```bash
//! cargo run --release --example train_embedding -- vectors.txt
//! ```

use std::path::PathBuf;

use wv_enrich::embedding::{train_skipgram, EmbeddingModel, SkipgramParams};
use wv_enrich::synthetic::SyntheticSpec;

fn main() -> wv_enrich::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("wv-enrich-vectors.txt"), PathBuf::from);
    let corpus = SyntheticSpec::default().generate();
    let params = SkipgramParams {
        dim: 50,
        epochs: 5,
        ..SkipgramParams::default()
    };
    let model = train_skipgram(&corpus.unlabelled, &params)?;
    model.save_word2vec_text(&out)?;
    println!("{} tokens x {} dims -> {}", model.len(), model.dim(), out.display());

    let loaded = EmbeddingModel::load_word2vec_text(&out)?;
    // the text format round-trips every component exactly
    assert!(model.tokens().iter().all(|t| loaded.vector(t) == model.vector(t)));
    for query in ["core0x0", "var3x7", "fill12"] {
        let nn = loaded.nearest_neighbors(query, 5, |_| true);
        let shown: Vec<String> = nn.iter().map(|(t, s)| format!("{t} {s:.3}")).collect();
        println!("{query}: {}", shown.join(", "));
    }
    Ok(())
}
