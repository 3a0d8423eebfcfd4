//! Tokenize, build a training vocabulary and turn texts into sparse
//! term-frequency vectors.

use wv_enrich::bow::vectorize;
use wv_enrich::corpus::{tokenize, Document, Vocabulary};

fn main() -> wv_enrich::Result<()> {
    let train = [
        Document::new("1", "Wheat exports rose; wheat prices fell.", ["grain"])?,
        Document::new("2", "Crude oil prices rose again", ["crude"])?,
    ];
    let vocab = Vocabulary::build(&train)?;
    println!("{} tokens, {} occurrences", vocab.len(), vocab.total_count());
    for t in vocab.tokens() {
        println!("  {t:<8} {}", vocab.freq(t));
    }

    let tokens = tokenize("Barley and wheat prices");
    let v = vectorize(&tokens, &vocab);
    println!("{tokens:?}");
    for (i, tf) in v.iter() {
        println!("  {} -> {tf}", vocab.token(i));
    }
    // "barley" and "and" are out of vocabulary and have no dimension
    println!("mass {} of {} tokens", v.mass(), tokens.len());
    Ok(())
}
