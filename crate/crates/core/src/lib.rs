//! Short-text classification with word-vector enrichment.
//!
//! Texts are represented as bag-of-words term-frequency vectors over the
//! training vocabulary. At prediction time, tokens that are rare or unseen in
//! the training data are expanded with their nearest neighbours in a word
//! embedding space, giving the linear classifier (multinomial naive Bayes or
//! a one-vs-one linear SVM) features it has weights for. Models are never
//! retrained; only the vector of the text being classified changes.
//!
//! ```
//! use wv_enrich::bow::vectorize;
//! use wv_enrich::corpus::{Document, Vocabulary};
//! use wv_enrich::embedding::EmbeddingModel;
//! use wv_enrich::enrichment::{enrich, EnrichmentConfig};
//!
//! let train = [Document::new("1", "the dog barked at the dog", ["pets"]).unwrap()];
//! let vocab = Vocabulary::build(&train).unwrap();
//! let model = EmbeddingModel::parse_word2vec_text(
//!     "3 2\npuppy 1 0\ndog 0.9 0.1\nbarked 0 1\n",
//! ).unwrap();
//!
//! let tokens = ["puppy", "barked"];
//! let plain = vectorize(&tokens, &vocab);
//! let rich = enrich(&tokens, &vocab, &model, EnrichmentConfig::new(1, 1));
//! assert_eq!(plain.mass(), 1);
//! assert_eq!(rich.get(vocab.index_of("dog").unwrap()), 1);
//! ```

pub mod bow;
pub mod classify;
pub mod corpus;
pub mod embedding;
pub mod enrichment;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod seed;
pub mod synthetic;

pub use error::{Error, Result};
