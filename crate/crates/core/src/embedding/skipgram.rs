//! Continuous skip-gram with negative sampling.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EmbeddingModel, TrainingMeta};
use crate::error::{Error, Result};

/// Skip-gram hyperparameters.
///
/// Defaults: 100 dimensions, window 10, minimum count 2, 10 epochs,
/// 5 negatives, initial learning rate 0.025.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkipgramParams {
    pub dim: usize,
    pub window: usize,
    pub min_count: usize,
    pub epochs: usize,
    pub negative_samples: usize,
    pub initial_learning_rate: f32,
    pub seed: u64,
}

impl Default for SkipgramParams {
    fn default() -> Self {
        SkipgramParams {
            dim: 100,
            window: 10,
            min_count: 2,
            epochs: 10,
            negative_samples: 5,
            initial_learning_rate: 0.025,
            seed: 1,
        }
    }
}

impl SkipgramParams {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("dim", self.dim),
            ("window", self.window),
            ("min_count", self.min_count),
            ("epochs", self.epochs),
            ("negative_samples", self.negative_samples),
        ];
        for (name, value) in counts {
            if value == 0 {
                return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
            }
        }
        if !(self.initial_learning_rate > 0.0) {
            return Err(Error::InvalidArgument("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Floor of the linearly decaying learning rate, relative to the initial one.
const MIN_LR_FRACTION: f32 = 1e-4;
const NOISE_POWER: f64 = 0.75;

/// Train input-side word vectors with skip-gram and negative sampling.
///
/// Each token list is one sentence; context windows never cross sentences.
/// Tokens below `min_count` are removed before windows are formed. Training
/// is single-threaded and bit-reproducible for a fixed seed.
pub fn train_skipgram<T, S>(sentences: &[T], params: &SkipgramParams) -> Result<EmbeddingModel>
where
    T: AsRef<[S]>,
    S: AsRef<str>,
{
    params.validate()?;

    let mut counts: HashMap<&str, u64> = HashMap::new();
    for s in sentences {
        for t in s.as_ref() {
            *counts.entry(t.as_ref()).or_default() += 1;
        }
    }
    let mut vocab: Vec<(&str, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= params.min_count as u64)
        .collect();
    if vocab.is_empty() {
        return Err(Error::EmptyCorpus("no token reaches min_count"));
    }
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let index: HashMap<&str, u32> = vocab
        .iter()
        .enumerate()
        .map(|(i, &(t, _))| (t, i as u32))
        .collect();

    let corpus: Vec<Vec<u32>> = sentences
        .iter()
        .map(|s| {
            s.as_ref()
                .iter()
                .filter_map(|t| index.get(t.as_ref()).copied())
                .collect()
        })
        .collect();
    let total_words: u64 = corpus.iter().map(|s| s.len() as u64).sum();

    let noise = NoiseSampler::new(vocab.iter().map(|&(_, c)| c));
    let dim = params.dim;
    let n = vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut input: Vec<f32> = (0..n * dim)
        .map(|_| (rng.gen::<f32>() - 0.5) / dim as f32)
        .collect();
    let mut output = vec![0f32; n * dim];
    let mut grad = vec![0f32; dim];

    let alpha0 = params.initial_learning_rate;
    let schedule_len = (params.epochs as u64 * total_words).max(1) as f64;
    let mut processed = 0u64;

    for _ in 0..params.epochs {
        for sentence in &corpus {
            for (pos, &center) in sentence.iter().enumerate() {
                let progress = processed as f64 / schedule_len;
                let lr = alpha0 * ((1.0 - progress) as f32).max(MIN_LR_FRACTION);
                processed += 1;

                let lo = pos.saturating_sub(params.window);
                let hi = (pos + params.window + 1).min(sentence.len());
                let c0 = center as usize * dim;
                for ctx_pos in lo..hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    let context = sentence[ctx_pos];
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    for d in 0..=params.negative_samples {
                        let (target, label) = if d == 0 {
                            (context, 1.0f32)
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let t0 = target as usize * dim;
                        let center_vec = &input[c0..c0 + dim];
                        let out_vec = &mut output[t0..t0 + dim];
                        let f: f32 = center_vec.iter().zip(out_vec.iter()).map(|(a, b)| a * b).sum();
                        let g = (label - sigmoid(f)) * lr;
                        for ((gr, o), &c) in grad.iter_mut().zip(out_vec.iter_mut()).zip(center_vec) {
                            *gr += g * *o;
                            *o += g * c;
                        }
                    }
                    for (x, g) in input[c0..c0 + dim].iter_mut().zip(&grad) {
                        *x += g;
                    }
                }
            }
        }
    }

    let tokens = vocab.iter().map(|&(t, _)| t.to_string()).collect();
    let meta = TrainingMeta {
        window: params.window,
        min_count: params.min_count,
        epochs: params.epochs,
        seed: params.seed,
    };
    EmbeddingModel::from_parts(dim, tokens, input, Some(meta))
}

fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

/// Draws token ids from the unigram distribution raised to the 3/4 power.
struct NoiseSampler {
    cumulative: Vec<f64>,
}

impl NoiseSampler {
    fn new(counts: impl Iterator<Item = u64>) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .map(|c| {
                acc += (c as f64).powf(NOISE_POWER);
                acc
            })
            .collect();
        NoiseSampler { cumulative }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let x = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= x);
        i.min(self.cumulative.len() - 1) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = SkipgramParams::default();
        assert_eq!((p.dim, p.window, p.min_count, p.epochs), (100, 10, 2, 10));
        assert_eq!(p.negative_samples, 5);
        p.validate().unwrap();
    }

    #[test]
    fn rejects_bad_params() {
        let p = SkipgramParams { window: 0, ..Default::default() };
        assert!(p.validate().is_err());
        let p = SkipgramParams { initial_learning_rate: 0.0, ..Default::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn min_count_drops_singletons() {
        let sentences = vec![vec!["a", "b", "a", "once"], vec!["b", "a"]];
        let params = SkipgramParams { dim: 8, epochs: 2, ..Default::default() };
        let m = train_skipgram(&sentences, &params).unwrap();
        assert!(m.contains("a") && m.contains("b"));
        assert!(!m.contains("once"));
        assert_eq!(m.meta().unwrap().min_count, 2);
        for t in m.tokens() {
            assert_eq!(m.vector(t).unwrap().len(), 8);
        }
    }

    #[test]
    fn empty_after_filter_is_an_error() {
        let sentences = vec![vec!["a", "b"]];
        assert!(matches!(
            train_skipgram(&sentences, &SkipgramParams::default()),
            Err(Error::EmptyCorpus(_))
        ));
        let none: Vec<Vec<&str>> = Vec::new();
        assert!(train_skipgram(&none, &SkipgramParams::default()).is_err());
    }

    #[test]
    fn noise_follows_smoothed_unigram() {
        let sampler = NoiseSampler::new([16u64, 1].into_iter());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 40_000;
        let zeros = (0..draws).filter(|_| sampler.sample(&mut rng) == 0).count();
        // 16^0.75 = 8 against 1
        let expected = 8.0 / 9.0;
        assert!((zeros as f64 / draws as f64 - expected).abs() < 0.01);
    }
}
