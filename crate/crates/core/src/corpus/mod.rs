//! Dataset ingestion, tokenization, vocabularies and cross-validation folds.
//!
//! Two input formats are understood:
//!
//! * `records`: one JSON object per line with a string `id`, a string `text`
//!   and an array-of-strings `labels`.
//! * `reuters-sgml`: the stock Reuters-21578 `reut2-*.sgm` files. Articles
//!   contribute their `<BODY>` text and `<TOPICS>` labels.

mod folds;
pub mod reuters;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use folds::{make_folds, FoldPlan};

/// Split text into lowercased maximal runs of alphanumeric characters.
///
/// Everything that is not alphanumeric separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|run| !run.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// A labelled text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
    /// Distinct labels in input order. The first one is the primary label
    /// used for training and for class bookkeeping.
    pub labels: Vec<String>,
}

impl Document {
    /// Build a document, tokenizing `text` and deduplicating `labels`.
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        labels: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self> {
        let id = id.into();
        let text = text.into();
        let mut seen = HashSet::new();
        let labels: Vec<String> = labels
            .into_iter()
            .map(Into::into)
            .filter(|l: &String| seen.insert(l.clone()))
            .collect();
        if labels.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "document {id:?} has no labels"
            )));
        }
        let tokens = tokenize(&text);
        Ok(Document {
            id,
            text,
            tokens,
            labels,
        })
    }

    pub fn primary_label(&self) -> &str {
        &self.labels[0]
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }
}

/// On-disk dataset layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    #[default]
    Records,
    ReutersSgml,
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "records" => Ok(DatasetFormat::Records),
            "reuters-sgml" => Ok(DatasetFormat::ReutersSgml),
            other => Err(Error::InvalidArgument(format!(
                "unknown dataset format {other:?} (expected records or reuters-sgml)"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    id: String,
    text: String,
    labels: Vec<String>,
}

/// Load a dataset in the given format.
///
/// For `reuters-sgml`, `path` may be a single `.sgm` file or a directory
/// holding the distribution's `reut2-*.sgm` files. Articles without topics
/// are skipped since every document needs at least one label.
pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<Vec<Document>> {
    match format {
        DatasetFormat::Records => {
            let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_records(&raw)
        }
        DatasetFormat::ReutersSgml => {
            let articles = reuters::read_path(path)?;
            let docs = articles
                .into_iter()
                .filter(|a| !a.topics.is_empty())
                .map(|a| Document::new(a.new_id, a.body, a.topics))
                .collect::<Result<Vec<_>>>()?;
            check_unique(&docs)?;
            Ok(docs)
        }
    }
}

/// Parse line-delimited records. Blank lines are ignored.
pub fn parse_records(raw: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in raw.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if !ids.insert(rec.id.clone()) {
            return Err(Error::DuplicateId(rec.id));
        }
        let doc = Document::new(rec.id, rec.text, rec.labels).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        docs.push(doc);
    }
    Ok(docs)
}

/// Write documents in the records format, one JSON object per line.
pub fn write_records<W: Write>(docs: &[Document], mut out: W) -> std::io::Result<()> {
    for d in docs {
        let rec = Record {
            id: d.id.clone(),
            text: d.text.clone(),
            labels: d.labels.clone(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn check_unique(docs: &[Document]) -> Result<()> {
    let mut ids = HashSet::new();
    for d in docs {
        if !ids.insert(d.id.as_str()) {
            return Err(Error::DuplicateId(d.id.clone()));
        }
    }
    Ok(())
}

/// Keep documents of at most `max_tokens` tokens whose labels avoid
/// `excluded_labels` entirely.
pub fn filter_short_subset(
    docs: &[Document],
    max_tokens: usize,
    excluded_labels: &HashSet<String>,
) -> Result<Vec<Document>> {
    if max_tokens == 0 {
        return Err(Error::InvalidArgument("max_tokens must be at least 1".into()));
    }
    Ok(docs
        .iter()
        .filter(|d| d.tokens.len() <= max_tokens)
        .filter(|d| !d.labels.iter().any(|l| excluded_labels.contains(l)))
        .cloned()
        .collect())
}

/// Distinct labels across all label sets, sorted.
pub fn label_set(docs: &[Document]) -> BTreeSet<&str> {
    docs.iter()
        .flat_map(|d| d.labels.iter().map(String::as_str))
        .collect()
}

/// Token-to-index map with training term frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    index: HashMap<String, usize>,
    tokens: Vec<String>,
    train_freq: Vec<u64>,
}

impl Vocabulary {
    /// Index every distinct token of the training documents.
    ///
    /// Indices are assigned in order of first appearance.
    pub fn build<'a, I>(training_docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Document>,
    {
        Self::from_token_streams(training_docs.into_iter().map(|d| d.tokens.as_slice()))
    }

    pub fn from_token_streams<'a, I>(streams: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut vocab = Vocabulary {
            index: HashMap::new(),
            tokens: Vec::new(),
            train_freq: Vec::new(),
        };
        let mut n_docs = 0usize;
        for stream in streams {
            n_docs += 1;
            for tok in stream {
                match vocab.index.get(tok) {
                    Some(&i) => vocab.train_freq[i] += 1,
                    None => {
                        vocab.index.insert(tok.clone(), vocab.tokens.len());
                        vocab.tokens.push(tok.clone());
                        vocab.train_freq.push(1);
                    }
                }
            }
        }
        if n_docs == 0 {
            return Err(Error::EmptyCorpus("vocabulary needs at least one document"));
        }
        Ok(vocab)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Training frequency; zero for out-of-vocabulary tokens.
    pub fn freq(&self, token: &str) -> u64 {
        self.index_of(token).map_or(0, |i| self.train_freq[i])
    }

    pub fn freq_at(&self, index: usize) -> u64 {
        self.train_freq[index]
    }

    pub fn total_count(&self) -> u64 {
        self.train_freq.iter().sum()
    }
}

/// Build a vocabulary from training documents.
pub fn build_vocabulary(training_docs: &[Document]) -> Result<Vocabulary> {
    Vocabulary::build(training_docs)
}
