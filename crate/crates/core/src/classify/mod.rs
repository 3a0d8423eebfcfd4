//! Linear classifiers over bag-of-words vectors.
//!
//! Two models are provided: multinomial naive Bayes ([`MnbModel`]) and a
//! one-vs-one linear SVM ([`SvmModel`]). Both rank every known class for an
//! input vector, so a caller can ask for the single best label or a top-k
//! list.

mod mnb;
mod svm;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bow::SparseVector;
use crate::error::{Error, Result};

pub use mnb::{predict_mnb, train_mnb, MnbModel};
pub use svm::{
    kkt_violation, predict_svm, train_binary_svm, train_svm_ovo, BinarySolution, SvmModel,
    SvmParams, KKT_TOLERANCE,
};

/// Classes ranked best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    ranked: Vec<(String, f64)>,
}

impl Prediction {
    pub fn ranked(&self) -> &[(String, f64)] {
        &self.ranked
    }

    /// The top label. Every trained model knows at least one class, so this
    /// never fails for model output.
    pub fn best(&self) -> &str {
        &self.ranked[0].0
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.ranked.iter().map(|(l, _)| l.as_str())
    }

    /// The first `min(k, classes)` labels.
    pub fn top_k(&self, k: usize) -> Vec<&str> {
        self.labels().take(k).collect()
    }
}

/// Free-function form of [`Prediction::top_k`].
pub fn top_k(p: &Prediction, k: usize) -> Vec<&str> {
    p.top_k(k)
}

/// Scores closer than this (relative) are treated as tied.
const TIE_TOLERANCE: f64 = 1e-9;

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * (1.0 + a.abs().max(b.abs()))
}

/// Order items by descending keys, most significant first. Runs of
/// near-equal keys at one level are ordered by the next level, and finally
/// by label.
///
/// Only total orders are used for sorting, so near-tie chains can never
/// make the sort inconsistent.
fn rank_by_keys(labels: &[String], keys: &[Vec<f64>]) -> Vec<usize> {
    fn rank(items: Vec<usize>, level: usize, labels: &[String], keys: &[Vec<f64>]) -> Vec<usize> {
        let mut items = items;
        if items.len() < 2 || level == keys[items[0]].len() {
            items.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
            return items;
        }
        items.sort_by(|&a, &b| keys[b][level].total_cmp(&keys[a][level]));
        let mut out = Vec::with_capacity(items.len());
        let mut run = vec![items[0]];
        for pair in items.windows(2) {
            if near(keys[pair[0]][level], keys[pair[1]][level]) {
                run.push(pair[1]);
            } else {
                out.extend(rank(std::mem::take(&mut run), level + 1, labels, keys));
                run.push(pair[1]);
            }
        }
        out.extend(rank(run, level + 1, labels, keys));
        out
    }
    rank((0..labels.len()).collect(), 0, labels, keys)
}

/// Either trained classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassifierModel {
    Mnb(MnbModel),
    Svm(SvmModel),
}

/// Current model file format version.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: ClassifierModel,
}

const MODEL_FORMAT_NAME: &str = "wv-enrich-classifier";

impl ClassifierModel {
    pub fn predict(&self, v: &SparseVector) -> Prediction {
        match self {
            ClassifierModel::Mnb(m) => m.predict(v),
            ClassifierModel::Svm(m) => m.predict(v),
        }
    }

    pub fn classes(&self) -> &[String] {
        match self {
            ClassifierModel::Mnb(m) => m.classes(),
            ClassifierModel::Svm(m) => m.classes(),
        }
    }

    /// Versioned JSON. Floating-point parameters are written in shortest
    /// round-trip form, so reloading is bit-exact.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelFile {
            format: MODEL_FORMAT_NAME.into(),
            version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        })?)
    }

    pub fn from_json(raw: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(raw)?;
        if file.format != MODEL_FORMAT_NAME {
            return Err(Error::InvalidArgument(format!(
                "not a classifier model file (format {:?})",
                file.format
            )));
        }
        if file.version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported model format version {}",
                file.version
            )));
        }
        let mut model = file.model;
        if let ClassifierModel::Svm(m) = &mut model {
            m.rebuild_index();
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&raw)
    }
}
