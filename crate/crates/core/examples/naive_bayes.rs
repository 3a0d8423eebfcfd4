//! Multinomial naive Bayes over term frequencies, with ranked predictions
//! and a JSON round trip.

use wv_enrich::bow::vectorize;
use wv_enrich::classify::{ClassifierModel, MnbModel};
use wv_enrich::corpus::{tokenize, Document, Vocabulary};

fn main() -> wv_enrich::Result<()> {
    let docs = [
        Document::new("1", "wheat corn harvest grain", ["grain"])?,
        Document::new("2", "corn exports grain prices", ["grain"])?,
        Document::new("3", "crude oil barrels opec", ["crude"])?,
        Document::new("4", "oil prices opec output", ["crude"])?,
        Document::new("5", "bank rate cut interest", ["interest"])?,
    ];
    let vocab = Vocabulary::build(&docs)?;
    let training: Vec<_> = docs
        .iter()
        .map(|d| (vectorize(&d.tokens, &vocab), d.primary_label()))
        .collect();
    let model = MnbModel::train(&training)?;

    for text in ["opec cuts oil output", "grain prices", "interest on corn loans"] {
        let p = model.predict(&vectorize(&tokenize(text), &vocab));
        let ranked: Vec<String> = p.ranked().iter().map(|(l, s)| format!("{l} {s:.2}")).collect();
        println!("{text:<24} -> {}", ranked.join(" | "));
    }

    let json = ClassifierModel::Mnb(model).to_json()?;
    let back = ClassifierModel::from_json(&json)?;
    println!("model json: {} bytes, classes {:?}", json.len(), back.classes());
    Ok(())
}
