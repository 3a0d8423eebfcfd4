//! Sparse term-frequency vectors.

use std::collections::BTreeMap;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

/// Term frequencies over vocabulary indices, stored as index-sorted pairs.
///
/// Zero entries are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, u32)>,
}

impl SparseVector {
    pub fn empty(dim: usize) -> Self {
        SparseVector {
            dim,
            entries: Vec::new(),
        }
    }

    /// Build from arbitrary `(index, count)` pairs; repeated indices are
    /// summed and zero counts dropped.
    pub fn from_counts(
        dim: usize,
        counts: impl IntoIterator<Item = (usize, u32)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
        for (i, c) in counts {
            if i >= dim {
                return Err(Error::InvalidArgument(format!(
                    "index {i} out of range for dimension {dim}"
                )));
            }
            *acc.entry(i).or_default() += c;
        }
        Ok(SparseVector {
            dim,
            entries: acc.into_iter().filter(|&(_, c)| c > 0).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, index: usize) -> u32 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0, |pos| self.entries[pos].1)
    }

    /// Stored entries in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().copied()
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all term frequencies.
    pub fn mass(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| u64::from(c)).sum()
    }

    /// Entrywise sum.
    pub fn add(&self, other: &SparseVector) -> Result<SparseVector> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(SparseVector {
            dim: self.dim,
            entries: out,
        })
    }
}

/// Count in-vocabulary tokens; out-of-vocabulary tokens are dropped.
pub fn vectorize<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> SparseVector {
    let counts = tokens
        .iter()
        .filter_map(|t| vocab.index_of(t.as_ref()))
        .map(|i| (i, 1));
    SparseVector::from_counts(vocab.len(), counts).expect("vocabulary indices are in range")
}

/// Entrywise sum of two vectors of equal dimension.
pub fn add(a: &SparseVector, b: &SparseVector) -> Result<SparseVector> {
    a.add(b)
}

pub fn nonzero_count(v: &SparseVector) -> usize {
    v.nonzero_count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use proptest::prelude::*;

    fn vocab(tokens: &str) -> Vocabulary {
        Vocabulary::build(&[Document::new("v", tokens, ["l"]).unwrap()]).unwrap()
    }

    fn sv(dim: usize, pairs: &[(usize, u32)]) -> SparseVector {
        SparseVector::from_counts(dim, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn vectorize_counts_and_drops_oov() {
        let v = vocab("a b c");
        assert_eq!(vectorize(&["a", "b", "a"], &v), sv(3, &[(0, 2), (1, 1)]));
        assert!(vectorize(&["z"], &v).is_empty());
        assert!(vectorize::<&str>(&[], &v).is_empty());
    }

    #[test]
    fn add_examples() {
        let a = sv(4, &[(0, 1)]);
        let b = sv(4, &[(0, 2), (3, 1)]);
        assert_eq!(a.add(&b).unwrap(), sv(4, &[(0, 3), (3, 1)]));
        assert_eq!(a.add(&SparseVector::empty(4)).unwrap(), a);
        assert!(matches!(
            a.add(&SparseVector::empty(5)),
            Err(Error::DimensionMismatch { left: 4, right: 5 })
        ));
    }

    #[test]
    fn nonzero_examples() {
        assert_eq!(nonzero_count(&SparseVector::empty(3)), 0);
        assert_eq!(nonzero_count(&sv(3, &[(0, 2), (1, 1)])), 2);
        assert_eq!(sv(3, &[(0, 0)]).nonzero_count(), 0);
        assert!(SparseVector::from_counts(2, [(2, 1)]).is_err());
    }

    fn arb_vec(dim: usize) -> impl Strategy<Value = SparseVector> {
        prop::collection::vec((0..dim, 1u32..5), 0..12)
            .prop_map(move |pairs| SparseVector::from_counts(dim, pairs).unwrap())
    }

    proptest! {
        #[test]
        fn add_is_commutative_and_associative(
            a in arb_vec(16), b in arb_vec(16), c in arb_vec(16)
        ) {
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            let sum = a.add(&b).unwrap();
            prop_assert!(sum.nonzero_count() >= a.nonzero_count().max(b.nonzero_count()));
            prop_assert_eq!(sum.mass(), a.mass() + b.mass());
            for i in 0..16 {
                prop_assert_eq!(sum.get(i), a.get(i) + b.get(i));
            }
        }

        #[test]
        fn vectorize_mass_counts_in_vocab_tokens(
            picks in prop::collection::vec(0usize..8, 0..30)
        ) {
            let v = vocab("t0 t1 t2 t3 t4");
            let tokens: Vec<String> = picks.iter().map(|p| format!("t{p}")).collect();
            let in_vocab = picks.iter().filter(|&&p| p < 5).count() as u64;
            prop_assert_eq!(vectorize(&tokens, &v).mass(), in_vocab);
        }
    }
}
