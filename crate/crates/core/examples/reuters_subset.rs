//! Build the short-article Reuters-21578 subset: bodies of at most 100
//! tokens, `earn` excluded. Needs the SGML distribution files.
//!
//! ```bash
//! cargo run --release --example reuters_subset -- /data/reuters21578 subset.jsonl
//! ```

use std::collections::HashSet;
use std::fs::File;
use std::io::BufWriter;

use wv_enrich::corpus::{filter_short_subset, label_set, load_dataset, write_records, DatasetFormat};

fn main() -> wv_enrich::Result<()> {
    let mut args = std::env::args().skip(1);
    let (Some(dir), out) = (args.next(), args.next()) else {
        eprintln!("usage: reuters_subset <reuters-dir> [out.jsonl]");
        std::process::exit(2);
    };
    let all = load_dataset(dir.as_ref(), DatasetFormat::ReutersSgml)?;
    let excluded: HashSet<String> = ["earn".to_string()].into();
    let subset = filter_short_subset(&all, 100, &excluded)?;
    println!(
        "{} labelled articles, {} in the subset over {} classes",
        all.len(),
        subset.len(),
        label_set(&subset).len()
    );
    let mean = subset.iter().map(|d| d.tokens.len()).sum::<usize>() as f64 / subset.len() as f64;
    println!("mean length {mean:.1} tokens");
    if let Some(path) = out {
        let file = File::create(&path).map_err(|e| wv_enrich::Error::Io { path: path.clone().into(), source: e })?;
        write_records(&subset, BufWriter::new(file))
            .map_err(|e| wv_enrich::Error::Io { path: path.into(), source: e })?;
    }
    Ok(())
}
