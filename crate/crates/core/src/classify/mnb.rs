use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{rank_by_keys, Prediction};
use crate::bow::SparseVector;
use crate::error::{Error, Result};

/// Multinomial naive Bayes with add-one (Laplace) smoothing.
///
/// Parameters are kept in log space:
/// `log_prior[c] = ln(N_c / N)` and
/// `log_cond[c][t] = ln((count(t, c) + 1) / (tokens(c) + |V|))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnbModel {
    classes: Vec<String>,
    dim: usize,
    log_prior: Vec<f64>,
    log_cond: Vec<Vec<f64>>,
}

impl MnbModel {
    pub fn train<L: AsRef<str>>(training: &[(SparseVector, L)]) -> Result<Self> {
        let Some((first, _)) = training.first() else {
            return Err(Error::EmptyCorpus("naive Bayes needs training instances"));
        };
        let dim = first.dim();

        let mut by_class: BTreeMap<&str, (u64, Vec<u64>)> = BTreeMap::new();
        for (v, label) in training {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: v.dim(),
                });
            }
            let (n, counts) = by_class
                .entry(label.as_ref())
                .or_insert_with(|| (0, vec![0; dim]));
            *n += 1;
            for (i, c) in v.iter() {
                counts[i] += u64::from(c);
            }
        }

        let total = training.len() as f64;
        let mut classes = Vec::with_capacity(by_class.len());
        let mut log_prior = Vec::with_capacity(by_class.len());
        let mut log_cond = Vec::with_capacity(by_class.len());
        for (label, (n, counts)) in by_class {
            classes.push(label.to_string());
            log_prior.push((n as f64 / total).ln());
            let tokens: u64 = counts.iter().sum();
            let denom = (tokens + dim as u64) as f64;
            log_cond.push(
                counts
                    .iter()
                    .map(|&c| ((c + 1) as f64 / denom).ln())
                    .collect(),
            );
        }
        Ok(MnbModel {
            classes,
            dim,
            log_prior,
            log_cond,
        })
    }

    /// Class labels in ascending order.
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn log_prior(&self) -> &[f64] {
        &self.log_prior
    }

    /// Smoothed log-conditionals of one class over the vocabulary.
    pub fn log_cond(&self, class: usize) -> &[f64] {
        &self.log_cond[class]
    }

    /// Joint log-likelihood `ln P(c) + sum_i v[i] ln P(t_i | c)` per class.
    pub fn scores(&self, v: &SparseVector) -> Vec<f64> {
        debug_assert_eq!(v.dim(), self.dim);
        self.log_prior
            .iter()
            .zip(&self.log_cond)
            .map(|(&prior, cond)| {
                prior
                    + v.iter()
                        .map(|(i, c)| f64::from(c) * cond[i])
                        .sum::<f64>()
            })
            .collect()
    }

    pub fn predict(&self, v: &SparseVector) -> Prediction {
        let scores = self.scores(v);
        let keys: Vec<Vec<f64>> = scores.iter().map(|&s| vec![s]).collect();
        let ranked = rank_by_keys(&self.classes, &keys)
            .into_iter()
            .map(|i| (self.classes[i].clone(), scores[i]))
            .collect();
        Prediction { ranked }
    }
}

pub fn train_mnb<L: AsRef<str>>(training: &[(SparseVector, L)]) -> Result<MnbModel> {
    MnbModel::train(training)
}

pub fn predict_mnb(model: &MnbModel, v: &SparseVector) -> Prediction {
    model.predict(v)
}
