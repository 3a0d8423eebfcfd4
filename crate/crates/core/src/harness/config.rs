use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::DatasetFormat;
use crate::embedding::SkipgramParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    #[default]
    Mnb,
    Svm,
}

impl ClassifierKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Mnb => "MNB",
            ClassifierKind::Svm => "SVM",
        }
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mnb" => Ok(ClassifierKind::Mnb),
            "svm" => Ok(ClassifierKind::Svm),
            other => Err(Error::InvalidArgument(format!(
                "unknown classifier {other:?} (expected mnb or svm)"
            ))),
        }
    }
}

/// Where the enrichment embedding comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingSource {
    /// Skip-gram trained on the text of every document in the dataset
    /// before cross-validation starts.
    #[default]
    TrainDomain,
    /// A word2vec text file.
    Load(PathBuf),
}

/// Everything needed to run one experiment. Mirrors the keys of the TOML
/// config file; missing keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub format: DatasetFormat,
    pub classifier: ClassifierKind,
    /// Soft-margin penalty of the SVM.
    pub svm_c: f64,
    pub embedding: EmbeddingSource,
    pub skipgram: SkipgramParams,
    /// Rare-word threshold.
    pub n: u64,
    /// Neighbours added per rare word.
    pub k: usize,
    /// When both ranges are set, `(n, k)` is chosen by grid search.
    pub n_range: Option<Vec<u64>>,
    pub k_range: Option<Vec<usize>>,
    pub repeats: usize,
    pub folds: usize,
    pub seed: u64,
    /// A test instance counts as correct when a gold label is among the
    /// top `top_k` predictions.
    pub top_k: usize,
    /// Directory for trained per-fold classifiers, reused across runs that
    /// differ only in enrichment settings.
    pub model_cache: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: PathBuf::new(),
            format: DatasetFormat::Records,
            classifier: ClassifierKind::Mnb,
            svm_c: 1.0,
            embedding: EmbeddingSource::TrainDomain,
            skipgram: SkipgramParams::default(),
            n: 3,
            k: 3,
            n_range: None,
            k_range: None,
            repeats: 10,
            folds: 10,
            seed: 42,
            top_k: 1,
            model_cache: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(raw: &str) -> Result<Self> {
        toml::from_str(raw).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&raw)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dataset.as_os_str().is_empty() {
            return Err(Error::InvalidArgument("no dataset given".into()));
        }
        if self.top_k == 0 {
            return Err(Error::InvalidArgument("top_k must be at least 1".into()));
        }
        if !(self.svm_c > 0.0) {
            return Err(Error::InvalidArgument("svm_c must be positive".into()));
        }
        match (&self.n_range, &self.k_range) {
            (Some(n), Some(k)) if n.is_empty() || k.is_empty() => Err(Error::InvalidArgument(
                "grid ranges must be non-empty".into(),
            )),
            (Some(_), None) | (None, Some(_)) => Err(Error::InvalidArgument(
                "grid search needs both n_range and k_range".into(),
            )),
            _ => self.skipgram.validate(),
        }
    }

    pub fn grid(&self) -> Option<(&[u64], &[usize])> {
        match (&self.n_range, &self.k_range) {
            (Some(n), Some(k)) => Some((n, k)),
            _ => None,
        }
    }
}

/// Parse a comma-separated list of values or inclusive `lo..hi` ranges,
/// e.g. `"1,3,5..7"`.
pub fn parse_range_list<T>(s: &str) -> Result<Vec<T>>
where
    T: FromStr + Copy + Ord + TryFrom<u64>,
{
    let bad = || Error::InvalidArgument(format!("bad range list {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u64 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            for v in lo..=hi {
                out.push(T::try_from(v).map_err(|_| bad())?);
            }
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_keys_mirror_fields() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
            dataset = "data.jsonl"
            classifier = "svm"
            n = 5
            k = 1
            embedding = { load = "vectors.txt" }
            n_range = [1, 3]
            k_range = [1]

            [skipgram]
            dim = 50
            "#,
        )
        .unwrap();
        assert_eq!(cfg.classifier, ClassifierKind::Svm);
        assert_eq!((cfg.n, cfg.k), (5, 1));
        assert_eq!(cfg.embedding, EmbeddingSource::Load("vectors.txt".into()));
        assert_eq!(cfg.skipgram.dim, 50);
        assert_eq!(cfg.skipgram.window, 10);
        assert_eq!(cfg.repeats, 10);
        cfg.validate().unwrap();
        assert_eq!(cfg.grid().unwrap().0, &[1, 3]);

        let domain = ExperimentConfig::from_toml_str("embedding = \"train-domain\"").unwrap();
        assert_eq!(domain.embedding, EmbeddingSource::TrainDomain);
        assert!(ExperimentConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate().is_err());
        cfg.dataset = "x".into();
        cfg.validate().unwrap();
        cfg.n_range = Some(vec![]);
        cfg.k_range = Some(vec![1]);
        assert!(cfg.validate().is_err());
        cfg.n_range = Some(vec![1]);
        cfg.k_range = None;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn range_lists() {
        assert_eq!(parse_range_list::<u64>("1,3,5..7").unwrap(), vec![1, 3, 5, 6, 7]);
        assert_eq!(parse_range_list::<usize>(" 2 ").unwrap(), vec![2]);
        assert_eq!(parse_range_list::<u64>("1..=2,2").unwrap(), vec![1, 2]);
        assert!(parse_range_list::<u64>("").is_err());
        assert!(parse_range_list::<u64>("3..1").is_err());
        assert!(parse_range_list::<u64>("a").is_err());
    }
}
