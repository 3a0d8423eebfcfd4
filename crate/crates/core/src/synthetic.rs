//! Seeded synthetic short-text corpora.
//!
//! Each class owns a handful of frequent "core" words and a larger pool of
//! "variant" words used interchangeably with them. Labelled documents are
//! short and mostly filler, so any one variant is seen only a few times in
//! training, if at all. An optional unlabelled corpus mixes core and variant
//! words of one class per sentence, which is what lets an embedding place
//! variants next to their class's core words.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Document;

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub classes: usize,
    pub core_words: usize,
    pub variant_words: usize,
    pub filler_words: usize,
    /// Labelled documents per class; one entry per class, cycled if shorter.
    pub docs_per_class: Vec<usize>,
    /// Topical tokens per labelled document.
    pub topical_tokens: usize,
    pub filler_tokens: usize,
    /// Probability that a topical token is a variant instead of a core word.
    pub variant_rate: f64,
    pub unlabelled_sentences: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            classes: 6,
            core_words: 4,
            variant_words: 40,
            filler_words: 60,
            docs_per_class: vec![60, 40, 30, 20, 15, 10],
            topical_tokens: 3,
            filler_tokens: 8,
            variant_rate: 0.7,
            unlabelled_sentences: 3000,
            seed: 7,
        }
    }
}

/// Labelled documents plus an unlabelled sentence corpus.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub documents: Vec<Document>,
    pub unlabelled: Vec<Vec<String>>,
}

pub fn class_name(c: usize) -> String {
    format!("topic{c:02}")
}

fn core(c: usize, i: usize) -> String {
    format!("core{c}x{i}")
}

fn variant(c: usize, i: usize) -> String {
    format!("var{c}x{i}")
}

fn filler(i: usize) -> String {
    format!("fill{i}")
}

impl SyntheticSpec {
    pub fn generate(&self) -> SyntheticCorpus {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut documents = Vec::new();
        let mut next_id = 0usize;
        for c in 0..self.classes {
            let count = self.docs_per_class[c % self.docs_per_class.len()];
            for _ in 0..count {
                let mut words: Vec<String> = (0..self.topical_tokens)
                    .map(|_| self.topical(&mut rng, c))
                    .collect();
                words.extend(
                    (0..self.filler_tokens).map(|_| filler(rng.gen_range(0..self.filler_words))),
                );
                words.shuffle(&mut rng);
                let doc = Document::new(format!("s{next_id}"), words.join(" "), [class_name(c)])
                    .expect("one label");
                documents.push(doc);
                next_id += 1;
            }
        }
        let unlabelled = (0..self.unlabelled_sentences)
            .map(|_| {
                let c = rng.gen_range(0..self.classes);
                let mut words: Vec<String> = (0..8).map(|_| self.topical_mixed(&mut rng, c)).collect();
                words.extend((0..4).map(|_| filler(rng.gen_range(0..self.filler_words))));
                words.shuffle(&mut rng);
                words
            })
            .collect();
        SyntheticCorpus {
            documents,
            unlabelled,
        }
    }

    fn topical(&self, rng: &mut ChaCha8Rng, c: usize) -> String {
        if rng.gen_bool(self.variant_rate) {
            variant(c, rng.gen_range(0..self.variant_words))
        } else {
            core(c, rng.gen_range(0..self.core_words))
        }
    }

    fn topical_mixed(&self, rng: &mut ChaCha8Rng, c: usize) -> String {
        if rng.gen_bool(0.5) {
            variant(c, rng.gen_range(0..self.variant_words))
        } else {
            core(c, rng.gen_range(0..self.core_words))
        }
    }
}
