use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ClassifierKind, EmbeddingSource, ExperimentConfig};
use crate::bow::{vectorize, SparseVector};
use crate::classify::{ClassifierModel, MnbModel, SvmModel, SvmParams};
use crate::corpus::{load_dataset, Document, FoldPlan, Vocabulary};
use crate::embedding::{train_skipgram, EmbeddingModel};
use crate::enrichment::{EnrichmentConfig, Enricher};
use crate::error::{Error, Result};
use crate::metrics::{
    error_reduction, macro_recall, micro_recall, wilcoxon_signed_rank, ConfusionTally,
    WilcoxonResult,
};
use crate::seed::{derive_seed, streams};

/// Micro and macro recall of one evaluation arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recall {
    pub micro: f64,
    pub macro_: f64,
}

impl Recall {
    fn of(t: &ConfusionTally) -> Result<Self> {
        Ok(Recall {
            micro: micro_recall(t)?,
            macro_: macro_recall(t)?,
        })
    }
}

/// Outcome of one (repeat, fold) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub repeat: usize,
    pub fold: usize,
    pub test_size: usize,
    pub baseline: Recall,
    pub enriched: Recall,
}

/// Significance of the enriched arm over the baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum Significance {
    Tested(WilcoxonResult),
    /// Every paired difference was zero.
    NoDifference,
}

impl Significance {
    fn of(baseline: &[f64], treatment: &[f64]) -> Result<Self> {
        match wilcoxon_signed_rank(baseline, treatment) {
            Ok(r) => Ok(Significance::Tested(r)),
            Err(Error::NoDifference) => Ok(Significance::NoDifference),
            Err(e) => Err(e),
        }
    }

    pub fn p_value(&self) -> Option<f64> {
        match self {
            Significance::Tested(r) => Some(r.p_two_sided),
            Significance::NoDifference => None,
        }
    }
}

/// Scores of every grid point on the tuning split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridOutcome {
    pub best: EnrichmentConfig,
    /// `(n, k, enriched micro recall)` in grid order.
    pub scores: Vec<(u64, usize, f64)>,
}

/// Full result of a cross-validated comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub classifier: ClassifierKind,
    pub enrichment: EnrichmentConfig,
    pub repeats: usize,
    pub folds: usize,
    pub seed: u64,
    pub fold_seed: u64,
    /// Seed of the domain-trained embedding; absent for loaded models.
    pub embedding_seed: Option<u64>,
    pub top_k: usize,
    pub cells: Vec<CellResult>,
    pub baseline: Recall,
    pub enriched: Recall,
    /// Percent reduction of `1 - recall`; absent when the baseline is perfect.
    pub micro_error_reduction: Option<f64>,
    pub macro_error_reduction: Option<f64>,
    pub micro_significance: Significance,
    pub macro_significance: Significance,
    pub grid: Option<GridOutcome>,
}

/// Cross-validation over an in-memory corpus with a ready embedding.
pub struct Experiment<'a> {
    pub docs: &'a [Document],
    pub plan: &'a FoldPlan,
    pub embedding: &'a EmbeddingModel,
    pub classifier: ClassifierKind,
    pub svm: SvmParams,
    pub top_k: usize,
    pub model_cache: Option<PathBuf>,
}

/// A trained cell, ready to score its test split under any enrichment.
pub struct PreparedCell<'a> {
    pub repeat: usize,
    pub fold: usize,
    pub vocab: Vocabulary,
    pub model: ClassifierModel,
    test: Vec<&'a Document>,
}

impl<'a> PreparedCell<'a> {
    pub fn test_docs(&self) -> &[&'a Document] {
        &self.test
    }

    /// Tally the test split, counting an instance correct when a gold label
    /// is among the top `top_k` predictions.
    pub fn tally(&self, top_k: usize, vector: impl Fn(&Document) -> SparseVector) -> ConfusionTally {
        let mut t = ConfusionTally::new();
        for doc in &self.test {
            let pred = self.model.predict(&vector(doc));
            let correct = pred.top_k(top_k).into_iter().any(|l| doc.has_label(l));
            t.record(doc.primary_label(), correct);
        }
        t
    }

    pub fn baseline_tally(&self, top_k: usize) -> ConfusionTally {
        self.tally(top_k, |d| vectorize(&d.tokens, &self.vocab))
    }

    pub fn enriched_tally(
        &self,
        top_k: usize,
        enricher: &Enricher<'_>,
        cfg: EnrichmentConfig,
    ) -> ConfusionTally {
        self.tally(top_k, |d| enricher.enrich(&d.tokens, &self.vocab, cfg))
    }
}

impl<'a> Experiment<'a> {
    fn cell_seed(&self, repeat: usize, fold: usize) -> u64 {
        derive_seed(
            derive_seed(self.plan.seed, streams::SVM),
            (repeat * self.plan.folds + fold) as u64,
        )
    }

    /// Train the classifier of one cell on its raw training vectors.
    pub fn prepare(&self, repeat: usize, fold: usize) -> Result<PreparedCell<'a>> {
        let wrap = |e: Error| Error::Fold {
            repeat,
            fold,
            source: Box::new(e),
        };
        let train: Vec<&Document> = self
            .plan
            .train_indices(repeat, fold)
            .into_iter()
            .map(|i| &self.docs[i])
            .collect();
        let test = self
            .plan
            .test_indices(repeat, fold)
            .into_iter()
            .map(|i| &self.docs[i])
            .collect();
        let vocab = Vocabulary::build(train.iter().copied()).map_err(wrap)?;

        let cache_file = self
            .model_cache
            .as_ref()
            .map(|dir| dir.join(self.cache_name(repeat, fold)));
        if let Some(path) = cache_file.as_ref().filter(|p| p.exists()) {
            let model = ClassifierModel::load(path).map_err(wrap)?;
            return Ok(PreparedCell {
                repeat,
                fold,
                vocab,
                model,
                test,
            });
        }

        let training: Vec<(SparseVector, &str)> = train
            .iter()
            .map(|d| (vectorize(&d.tokens, &vocab), d.primary_label()))
            .collect();
        let model = match self.classifier {
            ClassifierKind::Mnb => ClassifierModel::Mnb(MnbModel::train(&training).map_err(wrap)?),
            ClassifierKind::Svm => {
                let params = SvmParams {
                    seed: self.cell_seed(repeat, fold),
                    ..self.svm.clone()
                };
                ClassifierModel::Svm(SvmModel::train(&training, &params).map_err(wrap)?)
            }
        };
        if let Some(path) = cache_file {
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir).map_err(|e| wrap(Error::io(dir, e)))?;
            }
            model.save(&path).map_err(wrap)?;
        }
        Ok(PreparedCell {
            repeat,
            fold,
            vocab,
            model,
            test,
        })
    }

    fn cache_name(&self, repeat: usize, fold: usize) -> String {
        let kind = match self.classifier {
            ClassifierKind::Mnb => "mnb".to_string(),
            ClassifierKind::Svm => format!("svm-c{}", self.svm.c),
        };
        format!(
            "{kind}-{:016x}-s{}-f{}-r{repeat}-f{fold}.json",
            dataset_fingerprint(self.docs),
            self.plan.seed,
            self.plan.folds
        )
    }

    /// Evaluate every cell with and without enrichment and aggregate.
    pub fn run(&self, enrichment: EnrichmentConfig) -> Result<EvalResult> {
        let enricher = Enricher::new(self.embedding);
        let cells: Vec<(usize, usize)> = self.plan.cells().collect();
        let results = cells
            .par_iter()
            .map(|&(r, f)| {
                let cell = self.prepare(r, f)?;
                let baseline = Recall::of(&cell.baseline_tally(self.top_k))?;
                let enriched = Recall::of(&cell.enriched_tally(self.top_k, &enricher, enrichment))?;
                Ok(CellResult {
                    repeat: r,
                    fold: f,
                    test_size: cell.test.len(),
                    baseline,
                    enriched,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        aggregate(self, enrichment, results)
    }

    /// Pick `(n, k)` maximizing enriched micro recall on the test split of
    /// repeat 0, fold 0. Ties go to the smaller `n`, then the smaller `k`.
    pub fn grid_search(&self, n_range: &[u64], k_range: &[usize]) -> Result<GridOutcome> {
        if n_range.is_empty() || k_range.is_empty() {
            return Err(Error::InvalidArgument("grid ranges must be non-empty".into()));
        }
        let mut ns = n_range.to_vec();
        let mut ks = k_range.to_vec();
        ns.sort_unstable();
        ns.dedup();
        ks.sort_unstable();
        ks.dedup();

        let cell = self.prepare(0, 0)?;
        let enricher = Enricher::new(self.embedding);
        let grid: Vec<(u64, usize)> = ns
            .iter()
            .flat_map(|&n| ks.iter().map(move |&k| (n, k)))
            .collect();
        let scores = grid
            .par_iter()
            .map(|&(n, k)| {
                let t = cell.enriched_tally(self.top_k, &enricher, EnrichmentConfig::new(n, k));
                Ok((n, k, micro_recall(&t)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut best = scores[0];
        for &s in &scores[1..] {
            if s.2 > best.2 {
                best = s;
            }
        }
        Ok(GridOutcome {
            best: EnrichmentConfig::new(best.0, best.1),
            scores,
        })
    }
}

fn aggregate(
    exp: &Experiment<'_>,
    enrichment: EnrichmentConfig,
    cells: Vec<CellResult>,
) -> Result<EvalResult> {
    let count = cells.len() as f64;
    let mean = |f: &dyn Fn(&CellResult) -> f64| cells.iter().map(f).sum::<f64>() / count;
    let baseline = Recall {
        micro: mean(&|c| c.baseline.micro),
        macro_: mean(&|c| c.baseline.macro_),
    };
    let enriched = Recall {
        micro: mean(&|c| c.enriched.micro),
        macro_: mean(&|c| c.enriched.macro_),
    };
    let column = |f: &dyn Fn(&CellResult) -> f64| cells.iter().map(f).collect::<Vec<_>>();
    let micro_significance = Significance::of(
        &column(&|c| c.baseline.micro),
        &column(&|c| c.enriched.micro),
    )?;
    let macro_significance = Significance::of(
        &column(&|c| c.baseline.macro_),
        &column(&|c| c.enriched.macro_),
    )?;
    Ok(EvalResult {
        classifier: exp.classifier,
        enrichment,
        repeats: exp.plan.repeats,
        folds: exp.plan.folds,
        seed: exp.plan.seed,
        fold_seed: exp.plan.seed,
        embedding_seed: exp.embedding.meta().map(|m| m.seed),
        top_k: exp.top_k,
        baseline,
        enriched,
        micro_error_reduction: error_reduction(baseline.micro, enriched.micro).ok(),
        macro_error_reduction: error_reduction(baseline.macro_, enriched.macro_).ok(),
        micro_significance,
        macro_significance,
        cells,
        grid: None,
    })
}

/// FNV-1a over ids, labels and text; stable across platforms and releases.
fn dataset_fingerprint(docs: &[Document]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes.iter().chain(&[0xff]) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for d in docs {
        feed(d.id.as_bytes());
        for l in &d.labels {
            feed(l.as_bytes());
        }
        feed(d.text.as_bytes());
    }
    h
}

/// Train the domain embedding on every document's tokens.
pub fn train_domain_embedding(
    docs: &[Document],
    cfg: &ExperimentConfig,
) -> Result<EmbeddingModel> {
    let params = crate::embedding::SkipgramParams {
        seed: derive_seed(cfg.seed, streams::EMBEDDING),
        ..cfg.skipgram.clone()
    };
    let sentences: Vec<&[String]> = docs.iter().map(|d| d.tokens.as_slice()).collect();
    train_skipgram(&sentences, &params)
}

fn resolve_embedding(docs: &[Document], cfg: &ExperimentConfig) -> Result<EmbeddingModel> {
    match &cfg.embedding {
        EmbeddingSource::TrainDomain => train_domain_embedding(docs, cfg),
        EmbeddingSource::Load(path) => EmbeddingModel::load_word2vec_text(path),
    }
}

/// Build the experiment pieces that do not depend on `(n, k)`.
pub fn plan_for(docs: &[Document], cfg: &ExperimentConfig) -> Result<FoldPlan> {
    FoldPlan::new(
        docs,
        cfg.repeats,
        cfg.folds,
        derive_seed(cfg.seed, streams::FOLDS),
    )
}

/// Load the dataset, obtain the embedding, optionally grid-search `(n, k)`,
/// then cross-validate baseline against enriched classification.
pub fn run_cv(cfg: &ExperimentConfig) -> Result<EvalResult> {
    cfg.validate()?;
    let docs = load_dataset(&cfg.dataset, cfg.format)?;
    let embedding = resolve_embedding(&docs, cfg)?;
    run_cv_with(&docs, &embedding, cfg)
}

/// [`run_cv`] over documents and an embedding already in memory.
pub fn run_cv_with(
    docs: &[Document],
    embedding: &EmbeddingModel,
    cfg: &ExperimentConfig,
) -> Result<EvalResult> {
    let plan = plan_for(docs, cfg)?;
    let exp = Experiment {
        docs,
        plan: &plan,
        embedding,
        classifier: cfg.classifier,
        svm: SvmParams {
            c: cfg.svm_c,
            ..SvmParams::default()
        },
        top_k: cfg.top_k,
        model_cache: cfg.model_cache.clone(),
    };
    let grid = match cfg.grid() {
        Some((n, k)) => Some(exp.grid_search(n, k)?),
        None => None,
    };
    let enrichment = grid
        .as_ref()
        .map_or(EnrichmentConfig::new(cfg.n, cfg.k), |g| g.best);
    let mut result = exp.run(enrichment)?;
    result.seed = cfg.seed;
    result.grid = grid;
    Ok(result)
}

/// Grid search only, over the configured ranges.
pub fn grid_search(
    docs: &[Document],
    embedding: &EmbeddingModel,
    cfg: &ExperimentConfig,
    n_range: &[u64],
    k_range: &[usize],
) -> Result<GridOutcome> {
    let plan = plan_for(docs, cfg)?;
    let exp = Experiment {
        docs,
        plan: &plan,
        embedding,
        classifier: cfg.classifier,
        svm: SvmParams {
            c: cfg.svm_c,
            ..SvmParams::default()
        },
        top_k: cfg.top_k,
        model_cache: cfg.model_cache.clone(),
    };
    exp.grid_search(n_range, k_range)
}

pub(crate) fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
        }
        _ => Ok(()),
    }
}
