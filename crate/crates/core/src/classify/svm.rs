use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rank_by_keys, Prediction};
use crate::bow::SparseVector;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Largest tolerated projected-gradient magnitude at termination.
pub const KKT_TOLERANCE: f64 = 1e-3;

/// Value of the constant feature that carries the bias.
const BIAS_FEATURE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    /// Soft-margin penalty.
    pub c: f64,
    pub tolerance: f64,
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            tolerance: KKT_TOLERANCE,
            max_passes: 100_000,
            seed: 0,
        }
    }
}

/// Dual solution of one binary problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySolution {
    /// Dense weights over the feature dimension.
    pub weights: Vec<f64>,
    pub bias: f64,
    /// One multiplier per training instance, in `[0, C]`.
    pub alpha: Vec<f64>,
    pub passes: usize,
    /// Largest projected-gradient magnitude at termination.
    pub max_violation: f64,
}

/// Train a soft-margin linear SVM (hinge loss) by dual coordinate descent.
///
/// The bias is learned as the weight of a constant feature, so the solved
/// problem is `min 1/2 (|w|^2 + b^2) + C sum_i max(0, 1 - y_i (w.x_i + b))`.
/// `labels` are `+1.0` or `-1.0`. Iteration stops once every multiplier's
/// projected gradient is within `params.tolerance`, or after
/// `params.max_passes` passes over the data.
pub fn train_binary_svm(
    instances: &[&SparseVector],
    labels: &[f64],
    params: &SvmParams,
) -> Result<BinarySolution> {
    if instances.is_empty() || instances.len() != labels.len() {
        return Err(Error::InvalidArgument(
            "binary SVM needs one +/-1 label per instance".into(),
        ));
    }
    if !(params.c > 0.0) {
        return Err(Error::InvalidArgument("C must be positive".into()));
    }
    let dim = instances[0].dim();
    let c = params.c;
    let diag: Vec<f64> = instances
        .iter()
        .map(|x| x.iter().map(|(_, v)| f64::from(v).powi(2)).sum::<f64>() + BIAS_FEATURE.powi(2))
        .collect();

    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut alpha = vec![0.0; instances.len()];
    let mut order: Vec<usize> = (0..instances.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut passes = 0;
    let mut max_violation = f64::INFINITY;
    while passes < params.max_passes {
        passes += 1;
        order.shuffle(&mut rng);
        let mut pass_violation: f64 = 0.0;
        for &i in &order {
            let x = instances[i];
            let y = labels[i];
            let grad = y * (dot(&w, x) + b * BIAS_FEATURE) - 1.0;
            let pg = projected(grad, alpha[i], c);
            pass_violation = pass_violation.max(pg.abs());
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - grad / diag[i]).clamp(0.0, c);
                let step = (alpha[i] - old) * y;
                for (j, v) in x.iter() {
                    w[j] += step * f64::from(v);
                }
                b += step * BIAS_FEATURE;
            }
        }
        if pass_violation <= params.tolerance {
            max_violation = kkt_violation(instances, labels, c, &alpha, &w, b);
            if max_violation <= params.tolerance {
                break;
            }
        }
    }
    if max_violation.is_infinite() {
        max_violation = kkt_violation(instances, labels, c, &alpha, &w, b);
    }
    Ok(BinarySolution {
        weights: w,
        bias: b,
        alpha,
        passes,
        max_violation,
    })
}

fn dot(w: &[f64], x: &SparseVector) -> f64 {
    x.iter().map(|(j, v)| w[j] * f64::from(v)).sum()
}

fn projected(grad: f64, alpha: f64, c: f64) -> f64 {
    if alpha <= 0.0 {
        grad.min(0.0)
    } else if alpha >= c {
        grad.max(0.0)
    } else {
        grad
    }
}

/// Largest violation of the dual optimality conditions: the projected
/// gradient `y_i (w.x_i + b) - 1` for each multiplier, plus any mismatch
/// between `(w, b)` and `sum_i alpha_i y_i x_i`, and any multiplier outside
/// `[0, C]`.
pub fn kkt_violation(
    instances: &[&SparseVector],
    labels: &[f64],
    c: f64,
    alpha: &[f64],
    weights: &[f64],
    bias: f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    let mut rebuilt = vec![0.0; weights.len()];
    let mut rebuilt_b = 0.0;
    for ((x, &y), &a) in instances.iter().zip(labels).zip(alpha) {
        worst = worst.max((-a).max(a - c).max(0.0));
        let grad = y * (dot(weights, x) + bias * BIAS_FEATURE) - 1.0;
        worst = worst.max(projected(grad, a, c).abs());
        for (j, v) in x.iter() {
            rebuilt[j] += a * y * f64::from(v);
        }
        rebuilt_b += a * y * BIAS_FEATURE;
    }
    let drift = rebuilt
        .iter()
        .zip(weights)
        .map(|(r, w)| (r - w).abs())
        .fold((rebuilt_b - bias).abs(), f64::max);
    // Accumulated rounding in w is not a KKT failure; only flag real drift.
    if drift > 1e-6 {
        worst = worst.max(drift);
    }
    worst
}

/// One binary model of the one-vs-one ensemble. A positive decision value
/// votes for `first`, otherwise for `second`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairModel {
    pub first: usize,
    pub second: usize,
    /// Non-zero weights as `(feature, weight)`, ascending by feature.
    pub weights: Vec<(usize, f64)>,
    pub bias: f64,
    pub max_violation: f64,
}

/// One-vs-one ensemble of linear SVMs, one per unordered class pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    classes: Vec<String>,
    dim: usize,
    params: SvmParams,
    pairs: Vec<PairModel>,
    /// Feature-major copy of the pair weights for prediction.
    #[serde(skip)]
    by_feature: Vec<Vec<(u32, f64)>>,
}

impl SvmModel {
    pub fn train<L: AsRef<str> + Sync>(
        training: &[(SparseVector, L)],
        params: &SvmParams,
    ) -> Result<Self> {
        let classes: Vec<String> = training
            .iter()
            .map(|(_, l)| l.as_ref())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(str::to_string)
            .collect();
        if classes.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "one-vs-one SVM needs at least 2 classes, found {}",
                classes.len()
            )));
        }
        let dim = training[0].0.dim();
        if let Some((v, _)) = training.iter().find(|(v, _)| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: v.dim(),
            });
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
        for (i, (_, l)) in training.iter().enumerate() {
            let c = classes.binary_search_by(|x| x.as_str().cmp(l.as_ref())).expect("known class");
            members[c].push(i);
        }

        let pair_ids: Vec<(usize, usize)> = (0..classes.len())
            .flat_map(|a| (a + 1..classes.len()).map(move |b| (a, b)))
            .collect();
        let pairs = pair_ids
            .par_iter()
            .enumerate()
            .map(|(p, &(a, b))| {
                let idx: Vec<usize> = members[a].iter().chain(&members[b]).copied().collect();
                let xs: Vec<&SparseVector> = idx.iter().map(|&i| &training[i].0).collect();
                let ys: Vec<f64> = (0..idx.len())
                    .map(|k| if k < members[a].len() { 1.0 } else { -1.0 })
                    .collect();
                let pair_params = SvmParams {
                    seed: derive_seed(params.seed, p as u64),
                    ..params.clone()
                };
                let sol = train_binary_svm(&xs, &ys, &pair_params)?;
                Ok(PairModel {
                    first: a,
                    second: b,
                    weights: sol
                        .weights
                        .iter()
                        .enumerate()
                        .filter(|&(_, &w)| w != 0.0)
                        .map(|(j, &w)| (j, w))
                        .collect(),
                    bias: sol.bias,
                    max_violation: sol.max_violation,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut model = SvmModel {
            classes,
            dim,
            params: params.clone(),
            pairs,
            by_feature: Vec::new(),
        };
        model.rebuild_index();
        Ok(model)
    }

    pub(super) fn rebuild_index(&mut self) {
        let mut by_feature = vec![Vec::new(); self.dim];
        for (p, pair) in self.pairs.iter().enumerate() {
            for &(j, w) in &pair.weights {
                by_feature[j].push((p as u32, w));
            }
        }
        self.by_feature = by_feature;
    }

    /// Class labels in ascending order.
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &SvmParams {
        &self.params
    }

    pub fn pairs(&self) -> &[PairModel] {
        &self.pairs
    }

    /// Decision value `w.v + b` of every pair model.
    pub fn decisions(&self, v: &SparseVector) -> Vec<f64> {
        let mut out: Vec<f64> = self.pairs.iter().map(|p| p.bias * BIAS_FEATURE).collect();
        for (j, c) in v.iter() {
            if let Some(col) = self.by_feature.get(j) {
                for &(p, w) in col {
                    out[p as usize] += w * f64::from(c);
                }
            }
        }
        out
    }

    /// Majority vote over pair models. Ties go to the larger sum of signed
    /// margins over each tied class's pair models, then to the smaller label.
    /// The reported score is the vote count.
    pub fn predict(&self, v: &SparseVector) -> Prediction {
        let m = self.classes.len();
        let mut votes = vec![0.0; m];
        let mut margin = vec![0.0; m];
        for (pair, f) in self.pairs.iter().zip(self.decisions(v)) {
            if f >= 0.0 {
                votes[pair.first] += 1.0;
            } else {
                votes[pair.second] += 1.0;
            }
            margin[pair.first] += f;
            margin[pair.second] -= f;
        }
        let keys: Vec<Vec<f64>> = (0..m).map(|c| vec![votes[c], margin[c]]).collect();
        let ranked = rank_by_keys(&self.classes, &keys)
            .into_iter()
            .map(|c| (self.classes[c].clone(), votes[c]))
            .collect();
        Prediction { ranked }
    }
}

pub fn train_svm_ovo<L: AsRef<str> + Sync>(
    training: &[(SparseVector, L)],
    params: &SvmParams,
) -> Result<SvmModel> {
    SvmModel::train(training, params)
}

pub fn predict_svm(model: &SvmModel, v: &SparseVector) -> Prediction {
    model.predict(v)
}
