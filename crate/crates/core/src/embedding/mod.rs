//! Dense word vectors: skip-gram training, word2vec text I/O and cosine
//! nearest-neighbour queries.

mod skipgram;

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use skipgram::{train_skipgram, SkipgramParams};

/// Hyperparameters a model was trained with. Absent for loaded models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub window: usize,
    pub min_count: usize,
    pub epochs: usize,
    pub seed: u64,
}

/// A fixed-dimension vector per token.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    dim: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major `tokens.len() x dim`.
    vectors: Vec<f32>,
    norms: Vec<f64>,
    meta: Option<TrainingMeta>,
}

impl EmbeddingModel {
    /// Assemble a model from token/vector rows.
    pub fn from_rows<S: Into<String>>(
        dim: usize,
        rows: impl IntoIterator<Item = (S, Vec<f32>)>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("embedding dimension must be positive".into()));
        }
        let mut tokens = Vec::new();
        let mut vectors = Vec::new();
        for (row, (tok, v)) in rows.into_iter().enumerate() {
            if v.len() != dim {
                return Err(Error::Parse {
                    line: row + 1,
                    message: format!("expected {dim} components, found {}", v.len()),
                });
            }
            tokens.push(tok.into());
            vectors.extend(v);
        }
        Self::from_parts(dim, tokens, vectors, None)
    }

    fn from_parts(
        dim: usize,
        tokens: Vec<String>,
        vectors: Vec<f32>,
        meta: Option<TrainingMeta>,
    ) -> Result<Self> {
        debug_assert_eq!(tokens.len() * dim, vectors.len());
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate token {t:?}")));
            }
        }
        let norms = vectors.chunks_exact(dim).map(norm).collect();
        Ok(EmbeddingModel {
            dim,
            tokens,
            index,
            vectors,
            norms,
            meta,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn vector(&self, token: &str) -> Option<&[f32]> {
        self.index.get(token).map(|&i| self.row(i))
    }

    pub fn meta(&self) -> Option<&TrainingMeta> {
        self.meta.as_ref()
    }

    fn row(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    /// The `k` admitted tokens most cosine-similar to `token`, best first.
    ///
    /// The query token itself and zero vectors are never returned. Equal
    /// similarities are ordered by token. A token missing from the model
    /// yields an empty list.
    pub fn nearest_neighbors(
        &self,
        token: &str,
        k: usize,
        admit: impl Fn(&str) -> bool,
    ) -> Vec<(String, f64)> {
        let Some(&q) = self.index.get(token) else {
            return Vec::new();
        };
        if k == 0 || self.norms[q] == 0.0 {
            return Vec::new();
        }
        let query = self.row(q);
        let qn = self.norms[q];
        let mut scored: Vec<(usize, f64)> = (0..self.tokens.len())
            .filter(|&i| i != q && self.norms[i] > 0.0 && admit(&self.tokens[i]))
            .map(|i| (i, (dot(query, self.row(i)) / (qn * self.norms[i])).clamp(-1.0, 1.0)))
            .collect();
        let by_rank = |a: &(usize, f64), b: &(usize, f64)| {
            b.1.total_cmp(&a.1)
                .then_with(|| self.tokens[a.0].cmp(&self.tokens[b.0]))
        };
        if scored.len() > k {
            scored.select_nth_unstable_by(k - 1, by_rank);
            scored.truncate(k);
        }
        scored.sort_by(by_rank);
        scored
            .into_iter()
            .map(|(i, s)| (self.tokens[i].clone(), s))
            .collect()
    }

    /// Read the word2vec text format: a `<count> <dim>` header, then one
    /// `token c1 c2 ...` row per token.
    pub fn load_word2vec_text(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_word2vec_text(&raw)
    }

    pub fn parse_word2vec_text(raw: &str) -> Result<Self> {
        let mut lines = raw.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let header_err = |message: &str| Error::Parse {
            line: 1,
            message: message.to_string(),
        };
        let mut fields = header.split_whitespace();
        let count: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| header_err("header must be \"<vocab_size> <dimension>\""))?;
        let dim: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| header_err("header must be \"<vocab_size> <dimension>\""))?;
        if fields.next().is_some() || dim == 0 {
            return Err(header_err("header must be \"<vocab_size> <dimension>\""));
        }

        let mut tokens = Vec::with_capacity(count);
        let mut vectors = Vec::with_capacity(count * dim);
        for (i, line) in lines {
            let line_no = i + 1;
            let mut parts = line.split_whitespace();
            let tok = parts.next().expect("non-blank line has a field");
            let start = vectors.len();
            for p in parts {
                let x: f32 = p.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad component {p:?} for token {tok:?}"),
                })?;
                vectors.push(x);
            }
            let found = vectors.len() - start;
            if found != dim {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("token {tok:?} has {found} components, expected {dim}"),
                });
            }
            tokens.push(tok.to_string());
        }
        if tokens.len() != count {
            return Err(Error::Parse {
                line: 1,
                message: format!("header announces {count} rows, found {}", tokens.len()),
            });
        }
        Self::from_parts(dim, tokens, vectors, None)
    }

    /// Write the word2vec text format. Components use the shortest decimal
    /// form that parses back to the identical `f32`.
    pub fn save_word2vec_text(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        self.write_word2vec_text(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn write_word2vec_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.tokens.len(), self.dim)?;
        for (i, tok) in self.tokens.iter().enumerate() {
            out.write_all(tok.as_bytes())?;
            for x in self.row(i) {
                write!(out, " {x}")?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum()
}

fn norm(a: &[f32]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine of the angle between two vectors.
pub fn cosine(u: &[f32], v: &[f32]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Free-function form of [`EmbeddingModel::nearest_neighbors`].
pub fn nearest_neighbors(
    model: &EmbeddingModel,
    token: &str,
    k: usize,
    admit: impl Fn(&str) -> bool,
) -> Vec<(String, f64)> {
    model.nearest_neighbors(token, k, admit)
}
