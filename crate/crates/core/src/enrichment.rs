//! Nearest-neighbour enrichment of bag-of-words vectors.
//!
//! For a text about to be classified, every distinct token whose training
//! frequency is below `n` (out-of-vocabulary tokens included) is looked up in
//! the embedding model. Its `k` nearest neighbours that occur in the training
//! data are added to the text's vector with a frequency of 1 each. Training
//! vectors are never enriched.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::bow::{vectorize, SparseVector};
use crate::corpus::Vocabulary;
use crate::embedding::EmbeddingModel;

/// Rare-word threshold `n` and neighbour count `k`. Either one at zero
/// disables enrichment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnrichmentConfig {
    pub n: u64,
    pub k: usize,
}

impl EnrichmentConfig {
    pub fn new(n: u64, k: usize) -> Self {
        EnrichmentConfig { n, k }
    }

    pub fn is_disabled(&self) -> bool {
        self.n == 0 || self.k == 0
    }
}

/// Distinct tokens with training frequency below `n`, in order of first
/// occurrence.
pub fn find_rare_tokens<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary, n: u64) -> Vec<String> {
    let mut seen = HashSet::new();
    tokens
        .iter()
        .map(AsRef::as_ref)
        .filter(|t| vocab.freq(t) < n)
        .filter(|t| seen.insert(*t))
        .map(str::to_string)
        .collect()
}

/// Frequency-1 vector over the up-to-`k` nearest neighbours of `token` that
/// occur in the training data.
pub fn neighbor_vector(
    token: &str,
    model: &EmbeddingModel,
    vocab: &Vocabulary,
    k: usize,
) -> SparseVector {
    let neighbors = model.nearest_neighbors(token, k, |t| vocab.freq(t) > 0);
    to_vector(neighbors.iter().map(|(t, _)| t.as_str()), vocab)
}

fn to_vector<'a>(tokens: impl Iterator<Item = &'a str>, vocab: &Vocabulary) -> SparseVector {
    let counts = tokens.filter_map(|t| vocab.index_of(t)).map(|i| (i, 1));
    SparseVector::from_counts(vocab.len(), counts).expect("vocabulary indices are in range")
}

/// Enriched vector: `vectorize(tokens)` plus one neighbour vector per
/// distinct rare token.
pub fn enrich<S: AsRef<str>>(
    tokens: &[S],
    vocab: &Vocabulary,
    model: &EmbeddingModel,
    cfg: EnrichmentConfig,
) -> SparseVector {
    let base = vectorize(tokens, vocab);
    if cfg.is_disabled() {
        return base;
    }
    let rare = find_rare_tokens(tokens, vocab, cfg.n);
    let added = rare
        .iter()
        .flat_map(|t| model.nearest_neighbors(t, cfg.k, |c| vocab.freq(c) > 0))
        .filter_map(|(t, _)| vocab.index_of(&t))
        .map(|i| (i, 1));
    let extra = SparseVector::from_counts(vocab.len(), added).expect("indices in range");
    base.add(&extra).expect("same vocabulary")
}

/// Number of unfiltered neighbours memoized per token by [`Enricher`].
const CACHED_NEIGHBORS: usize = 64;

/// Enrichment over a shared embedding model with a memo of each token's
/// ranked neighbour list.
///
/// The memo holds the top neighbours without any admit filter. Filtering a
/// prefix of the full ranking gives exactly the top admitted neighbours, so
/// results are identical to [`enrich`]; a linear scan is used whenever the
/// cached prefix holds fewer than `k` admitted tokens.
pub struct Enricher<'m> {
    model: &'m EmbeddingModel,
    cache: RwLock<HashMap<String, Arc<Vec<String>>>>,
}

impl<'m> Enricher<'m> {
    pub fn new(model: &'m EmbeddingModel) -> Self {
        Enricher {
            model,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &EmbeddingModel {
        self.model
    }

    fn ranked(&self, token: &str) -> Arc<Vec<String>> {
        if let Some(hit) = self.cache.read().expect("cache lock").get(token) {
            return Arc::clone(hit);
        }
        let list: Vec<String> = self
            .model
            .nearest_neighbors(token, CACHED_NEIGHBORS, |_| true)
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        let list = Arc::new(list);
        self.cache
            .write()
            .expect("cache lock")
            .entry(token.to_string())
            .or_insert(list)
            .clone()
    }

    /// Neighbour tokens used for one rare token.
    pub fn neighbors(&self, token: &str, vocab: &Vocabulary, k: usize) -> Vec<String> {
        if k == 0 {
            return Vec::new();
        }
        let ranked = self.ranked(token);
        let admitted: Vec<String> = ranked
            .iter()
            .filter(|t| vocab.freq(t) > 0)
            .take(k)
            .cloned()
            .collect();
        let exhausted = ranked.len() < CACHED_NEIGHBORS;
        if admitted.len() == k || exhausted {
            admitted
        } else {
            self.model
                .nearest_neighbors(token, k, |c| vocab.freq(c) > 0)
                .into_iter()
                .map(|(t, _)| t)
                .collect()
        }
    }

    pub fn enrich<S: AsRef<str>>(
        &self,
        tokens: &[S],
        vocab: &Vocabulary,
        cfg: EnrichmentConfig,
    ) -> SparseVector {
        let base = vectorize(tokens, vocab);
        if cfg.is_disabled() {
            return base;
        }
        let added: Vec<String> = find_rare_tokens(tokens, vocab, cfg.n)
            .iter()
            .flat_map(|t| self.neighbors(t, vocab, cfg.k))
            .collect();
        let extra = to_vector(added.iter().map(String::as_str), vocab);
        base.add(&extra).expect("same vocabulary")
    }
}
