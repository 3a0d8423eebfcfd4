use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Document;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Repeated k-fold assignment of documents to test folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub repeats: usize,
    pub folds: usize,
    pub seed: u64,
    ids: Vec<String>,
    /// `assignment[repeat][doc]` is the test fold of document `doc`.
    assignment: Vec<Vec<usize>>,
}

impl FoldPlan {
    /// Seeded partition of `docs` into `folds` near-equal folds, `repeats`
    /// times.
    ///
    /// Documents whose primary label has at least `folds` instances are
    /// dealt class by class so each fold gets its share of the class; the
    /// rest are pooled and dealt after them. Dealing is round-robin with a
    /// counter that carries across groups, so fold sizes differ by at most 1.
    pub fn new(docs: &[Document], repeats: usize, folds: usize, seed: u64) -> Result<Self> {
        if folds < 2 {
            return Err(Error::InvalidArgument("folds must be at least 2".into()));
        }
        if repeats < 1 {
            return Err(Error::InvalidArgument("repeats must be at least 1".into()));
        }
        if docs.len() < folds {
            return Err(Error::InvalidArgument(format!(
                "{} documents cannot fill {folds} folds",
                docs.len()
            )));
        }

        let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, d) in docs.iter().enumerate() {
            by_class.entry(d.primary_label()).or_default().push(i);
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut pooled = Vec::new();
        for (_, members) in by_class {
            if members.len() >= folds {
                groups.push(members);
            } else {
                pooled.extend(members);
            }
        }
        groups.push(pooled);

        let assignment = (0..repeats)
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
                let mut fold_of = vec![0usize; docs.len()];
                let mut counter = 0usize;
                for group in &groups {
                    let mut order = group.clone();
                    order.shuffle(&mut rng);
                    for doc in order {
                        fold_of[doc] = counter % folds;
                        counter += 1;
                    }
                }
                fold_of
            })
            .collect();

        Ok(FoldPlan {
            repeats,
            folds,
            seed,
            ids: docs.iter().map(|d| d.id.clone()).collect(),
            assignment,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Document ids in the order the plan was built with.
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn fold_of(&self, repeat: usize, doc: usize) -> usize {
        self.assignment[repeat][doc]
    }

    /// Positions of the test documents of one (repeat, fold) cell.
    pub fn test_indices(&self, repeat: usize, fold: usize) -> Vec<usize> {
        self.indices(repeat, |f| f == fold)
    }

    /// Positions of the training documents of one (repeat, fold) cell.
    pub fn train_indices(&self, repeat: usize, fold: usize) -> Vec<usize> {
        self.indices(repeat, |f| f != fold)
    }

    fn indices(&self, repeat: usize, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        self.assignment[repeat]
            .iter()
            .enumerate()
            .filter(|&(_, &f)| keep(f))
            .map(|(i, _)| i)
            .collect()
    }

    /// Every (repeat, fold) evaluation cell in order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.repeats).flat_map(move |r| (0..self.folds).map(move |f| (r, f)))
    }
}

/// Build a fold plan; see [`FoldPlan::new`].
pub fn make_folds(docs: &[Document], repeats: usize, folds: usize, seed: u64) -> Result<FoldPlan> {
    FoldPlan::new(docs, repeats, folds, seed)
}
