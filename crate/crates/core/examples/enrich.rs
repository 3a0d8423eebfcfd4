//! Enrich a short text: every rare or unseen token contributes its nearest
//! known neighbours from the embedding.

use wv_enrich::bow::vectorize;
use wv_enrich::corpus::{tokenize, Document, Vocabulary};
use wv_enrich::embedding::EmbeddingModel;
use wv_enrich::enrichment::{enrich, find_rare_tokens, EnrichmentConfig};

fn main() -> wv_enrich::Result<()> {
    let train = [
        Document::new("1", "the dog barked at the dog next door", ["pets"])?,
        Document::new("2", "the cat sat and the cat slept", ["pets"])?,
        Document::new("3", "stocks fell as the market slid", ["finance"])?,
    ];
    let vocab = Vocabulary::build(&train)?;
    let model = EmbeddingModel::from_rows(
        3,
        [
            ("puppy", vec![0.9, 0.1, 0.0]),
            ("dog", vec![1.0, 0.0, 0.0]),
            ("cat", vec![0.7, 0.3, 0.0]),
            ("kitten", vec![0.6, 0.4, 0.0]),
            ("market", vec![0.0, 0.0, 1.0]),
            ("stocks", vec![0.0, 0.1, 0.9]),
        ],
    )?;

    let tokens = tokenize("A puppy and a kitten");
    let cfg = EnrichmentConfig::new(2, 2);
    println!("rare: {:?}", find_rare_tokens(&tokens, &vocab, cfg.n));
    let show = |label: &str, v: &wv_enrich::bow::SparseVector| {
        let parts: Vec<String> = v.iter().map(|(i, tf)| format!("{}:{tf}", vocab.token(i))).collect();
        println!("{label:<9} {{{}}}", parts.join(", "));
    };
    show("baseline", &vectorize(&tokens, &vocab));
    show("enriched", &enrich(&tokens, &vocab, &model, cfg));
    Ok(())
}
