//! One-vs-one linear SVM: one binary model per class pair, majority vote.

use wv_enrich::bow::vectorize;
use wv_enrich::classify::{SvmModel, SvmParams};
use wv_enrich::corpus::{tokenize, Vocabulary};
use wv_enrich::synthetic::{class_name, SyntheticSpec};

fn main() -> wv_enrich::Result<()> {
    let corpus = SyntheticSpec {
        unlabelled_sentences: 0,
        ..SyntheticSpec::default()
    }
    .generate();
    let vocab = Vocabulary::build(&corpus.documents)?;
    let training: Vec<_> = corpus
        .documents
        .iter()
        .map(|d| (vectorize(&d.tokens, &vocab), d.primary_label()))
        .collect();
    let model = SvmModel::train(&training, &SvmParams::default())?;
    println!("{} classes, {} pairwise models", model.classes().len(), model.pairs().len());
    let worst = model.pairs().iter().map(|p| p.max_violation).fold(0.0, f64::max);
    println!("largest KKT violation {worst:.2e}");

    let correct = training
        .iter()
        .filter(|(v, l)| model.predict(v).best() == *l)
        .count();
    println!("training recall {:.3}", correct as f64 / training.len() as f64);

    let p = model.predict(&vectorize(&tokenize("core2x1 fill3 core2x0"), &vocab));
    println!("votes: {:?}, expected {}", &p.ranked()[..3], class_name(2));
    Ok(())
}
