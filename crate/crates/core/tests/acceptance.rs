//! Acceptance criteria. Each test prints one `[criterion N] PASS|FAIL` line.
//!
//! Criterion 7 needs the Reuters-21578 SGML distribution; point
//! `REUTERS21578_DIR` at the directory holding `reut2-*.sgm` to run it.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wv_enrich::bow::{vectorize, SparseVector};
use wv_enrich::classify::{
    kkt_violation, train_binary_svm, train_mnb, train_svm_ovo, SvmParams, KKT_TOLERANCE,
};
use wv_enrich::corpus::{Document, Vocabulary};
use wv_enrich::embedding::{train_skipgram, EmbeddingModel, SkipgramParams};
use wv_enrich::enrichment::{enrich, find_rare_tokens, EnrichmentConfig};
use wv_enrich::harness::{ClassifierKind, Experiment};
use wv_enrich::metrics::{
    error_reduction, micro_recall, tally, wilcoxon_signed_rank, wilcoxon_signed_rank_with,
    WilcoxonMethod,
};
use wv_enrich::synthetic::SyntheticSpec;

/// Written to the stdout handle directly so the line survives test capture.
fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

fn verdict(id: u32, name: &str, pass: bool, detail: &str) {
    report(&format!(
        "[criterion {id}] {} {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    ));
    assert!(pass, "criterion {id} failed: {detail}");
}

// ---------------------------------------------------------------------------
// 1. Enrichment identity and bounds.

fn random_instance(rng: &mut ChaCha8Rng) -> (Vec<String>, Vocabulary, EmbeddingModel) {
    let universe: Vec<String> = (0..30).map(|i| format!("t{i}")).collect();
    let docs: Vec<Document> = (0..rng.gen_range(1..5))
        .map(|d| {
            let len = rng.gen_range(1..12);
            let text: Vec<&str> = (0..len)
                .map(|_| universe[rng.gen_range(0..20)].as_str())
                .collect();
            Document::new(format!("d{d}"), text.join(" "), ["x"]).unwrap()
        })
        .collect();
    let vocab = Vocabulary::build(&docs).unwrap();
    let dim = 4;
    let mut in_model: Vec<&String> = universe.iter().filter(|_| rng.gen_bool(0.7)).collect();
    in_model.shuffle(rng);
    let model = EmbeddingModel::from_rows(
        dim,
        in_model
            .into_iter()
            .map(|t| (t.clone(), (0..dim).map(|_| rng.gen_range(-1.0f32..1.0)).collect())),
    )
    .unwrap();
    let tokens = (0..rng.gen_range(0..15))
        .map(|_| universe[rng.gen_range(0..30)].clone())
        .collect();
    (tokens, vocab, model)
}

#[test]
fn criterion_1_enrichment_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = 0;
    for _ in 0..1000 {
        let (tokens, vocab, model) = random_instance(&mut rng);
        let n = rng.gen_range(0..6);
        let k = rng.gen_range(1..5);
        let base = vectorize(&tokens, &vocab);
        if enrich(&tokens, &vocab, &model, EnrichmentConfig::new(n, 0)) != base {
            failures += 1;
        }
        let rich = enrich(&tokens, &vocab, &model, EnrichmentConfig::new(n, k));
        let rare = find_rare_tokens(&tokens, &vocab, n).len() as u64;
        let monotone = (0..vocab.len()).all(|i| rich.get(i) >= base.get(i));
        let bounded = rich.mass() - base.mass() <= k as u64 * rare;
        let admitted = rich.iter().all(|(i, _)| vocab.freq_at(i) > 0);
        if !(monotone && bounded && admitted) {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "enrichment identity",
        failures == 0 && elapsed < Duration::from_secs(1),
        &format!("{failures} violations over 1000 instances in {elapsed:?}"),
    );
}

// ---------------------------------------------------------------------------
// 2. MNB against an exact-rational Bayes oracle.

fn rat(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Labels ranked by exact `P(c) prod_t P(t|c)^v_t`, ties by label.
fn oracle_ranking(docs: &[(Vec<u32>, &str)], v: &[u32]) -> Vec<String> {
    let dim = v.len() as u64;
    let mut classes: BTreeMap<&str, (u64, Vec<u64>)> = BTreeMap::new();
    for (counts, label) in docs {
        let e = classes.entry(label).or_insert_with(|| (0, vec![0; v.len()]));
        e.0 += 1;
        for (acc, &c) in e.1.iter_mut().zip(counts) {
            *acc += u64::from(c);
        }
    }
    let total = docs.len() as u64;
    let mut scored: Vec<(String, BigRational)> = classes
        .into_iter()
        .map(|(label, (n, counts))| {
            let tokens: u64 = counts.iter().sum();
            let mut p = rat(n, total);
            for (t, &times) in v.iter().enumerate() {
                for _ in 0..times {
                    p *= rat(counts[t] + 1, tokens + dim);
                }
            }
            (label.to_string(), p)
        })
        .collect();
    scored.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.into_iter().map(|(l, _)| l).collect()
}

#[test]
fn criterion_2_mnb_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let labels = ["A", "B", "C"];
    let mut checked = 0;
    let mut mismatches = 0;
    for _ in 0..400 {
        let dim = rng.gen_range(1..=5);
        let n_docs = rng.gen_range(1..=5);
        let docs: Vec<(Vec<u32>, &str)> = (0..n_docs)
            .map(|_| {
                let counts = (0..dim).map(|_| rng.gen_range(0..3)).collect();
                (counts, labels[rng.gen_range(0..3)])
            })
            .collect();
        let training: Vec<(SparseVector, &str)> = docs
            .iter()
            .map(|(c, l)| {
                let sv = SparseVector::from_counts(dim, c.iter().enumerate().map(|(i, &x)| (i, x)))
                    .unwrap();
                (sv, *l)
            })
            .collect();
        let model = train_mnb(&training).unwrap();
        // every count vector with entries in 0..=2
        for code in 0u32..3u32.pow(dim as u32) {
            let v: Vec<u32> = (0..dim).map(|t| code / 3u32.pow(t as u32) % 3).collect();
            let sv = SparseVector::from_counts(dim, v.iter().enumerate().map(|(i, &x)| (i, x)))
                .unwrap();
            let got: Vec<String> = model.predict(&sv).labels().map(str::to_string).collect();
            if got != oracle_ranking(&docs, &v) {
                mismatches += 1;
            }
            checked += 1;
        }
    }
    verdict(
        2,
        "MNB oracle equivalence",
        mismatches == 0,
        &format!("{mismatches} mismatches over {checked} (corpus, vector) cases"),
    );
}

// ---------------------------------------------------------------------------
// 3. Metric identities.

#[test]
fn criterion_3_metric_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..60);
        let classes = ["a", "b", "c", "d"];
        let gold: Vec<Vec<String>> = (0..n)
            .map(|_| vec![classes[rng.gen_range(0..4)].to_string()])
            .collect();
        let pred: Vec<&str> = (0..n).map(|_| classes[rng.gen_range(0..4)]).collect();
        let primary: Vec<&str> = gold.iter().map(|g| g[0].as_str()).collect();
        let t = tally(&gold, &pred, &primary).unwrap();
        let correct = gold.iter().zip(&pred).filter(|(g, p)| g[0] == **p).count();
        let accuracy = correct as f64 / n as f64;
        if micro_recall(&t).unwrap() != accuracy {
            mismatches += 1;
        }
    }
    let er = error_reduction(0.178, 0.212).unwrap();
    verdict(
        3,
        "metric identities",
        mismatches == 0 && (er - 4.14).abs() <= 0.005,
        &format!("{mismatches} micro/accuracy mismatches over 1000 tallies; error_reduction(0.178, 0.212) = {er:.4}%"),
    );
}

// ---------------------------------------------------------------------------
// 4. Wilcoxon correctness.

/// Two-sided p by enumerating every sign assignment of the given ranks.
fn enumerate_p(ranks: &[f64], w_plus: f64) -> f64 {
    let n = ranks.len();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w <= w_plus + 1e-9 {
            le += 1;
        }
        if w >= w_plus - 1e-9 {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    (2.0 * (le.min(ge) as f64) / total).min(1.0)
}

#[test]
fn criterion_4_wilcoxon() {
    let diffs = [1.0, 2.0, 3.0, 4.0, 5.0];
    let oracle = enumerate_p(&diffs, 15.0);
    let r = wilcoxon_signed_rank(&[0.0; 5], &diffs).unwrap();
    let exact_ok = r.exact && (r.p_two_sided - 0.0625).abs() < 1e-12 && (oracle - 0.0625).abs() < 1e-12;

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let base: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..1.0)).collect();
        let shift = rng.gen_range(-0.3..0.3);
        let treat: Vec<f64> = base
            .iter()
            .map(|b| b + shift + rng.gen_range(-0.5..0.5))
            .collect();
        let e = wilcoxon_signed_rank_with(&base, &treat, WilcoxonMethod::Exact).unwrap();
        let a = wilcoxon_signed_rank_with(&base, &treat, WilcoxonMethod::Normal).unwrap();
        worst = worst.max((e.p_two_sided - a.p_two_sided).abs());
    }
    verdict(
        4,
        "Wilcoxon correctness",
        exact_ok && worst <= 0.02,
        &format!(
            "exact p = {} (enumeration {oracle}); max |exact - normal| over 100 n=20 samples = {worst:.4}",
            r.p_two_sided
        ),
    );
}

// ---------------------------------------------------------------------------
// 5. SVM contract.

fn sv(dim: usize, pairs: &[(usize, u32)]) -> SparseVector {
    SparseVector::from_counts(dim, pairs.iter().copied()).unwrap()
}

#[test]
fn criterion_5_svm_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let dim = 40;

    // Class A draws from features 0..15, class B from 15..30; both share 30..40.
    let separable: Vec<(SparseVector, &str)> = (0..120)
        .map(|i| {
            let (lo, hi, label) = if i % 2 == 0 { (0, 15, "A") } else { (15, 30, "B") };
            let mut pairs: Vec<(usize, u32)> =
                (0..3).map(|_| (rng.gen_range(lo..hi), rng.gen_range(1..3))).collect();
            pairs.push((rng.gen_range(30..40), 1));
            (sv(dim, &pairs), label)
        })
        .collect();
    let model = train_svm_ovo(&separable, &SvmParams::default()).unwrap();
    let correct = separable
        .iter()
        .filter(|(v, l)| model.predict(v).best() == *l)
        .count();
    let recall = correct as f64 / separable.len() as f64;

    let mut counts_ok = true;
    let mut worst_kkt: f64 = 0.0;
    for m in [2usize, 3, 10] {
        let data: Vec<(SparseVector, String)> = (0..m * 12)
            .map(|i| {
                let c = i % m;
                let pairs: Vec<(usize, u32)> = (0..4)
                    .map(|_| {
                        let f = if rng.gen_bool(0.6) { c } else { rng.gen_range(0..dim) };
                        (f, rng.gen_range(1..3))
                    })
                    .collect();
                (sv(dim, &pairs), format!("class{c:02}"))
            })
            .collect();
        let model = train_svm_ovo(&data, &SvmParams::default()).unwrap();
        counts_ok &= model.pairs().len() == m * (m - 1) / 2;
        for pair in model.pairs() {
            worst_kkt = worst_kkt.max(pair.max_violation);
            let (a, b) = (&model.classes()[pair.first], &model.classes()[pair.second]);
            let members: Vec<&(SparseVector, String)> =
                data.iter().filter(|(_, l)| l == a || l == b).collect();
            let xs: Vec<&SparseVector> = members.iter().map(|(v, _)| v).collect();
            let ys: Vec<f64> = members
                .iter()
                .map(|(_, l)| if l == a { 1.0 } else { -1.0 })
                .collect();
            let sol = train_binary_svm(&xs, &ys, &SvmParams::default()).unwrap();
            worst_kkt = worst_kkt.max(kkt_violation(&xs, &ys, 1.0, &sol.alpha, &sol.weights, sol.bias));
        }
    }
    verdict(
        5,
        "SVM contract",
        recall == 1.0 && counts_ok && worst_kkt <= KKT_TOLERANCE,
        &format!("separable training recall {recall}; pair counts ok: {counts_ok}; worst KKT violation {worst_kkt:.2e}"),
    );
}

// ---------------------------------------------------------------------------
// 6. Skip-gram sanity.

fn two_group_corpus() -> (Vec<Vec<String>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let sentences = (0..200)
        .map(|_| {
            let g = rng.gen_range(0..2);
            (0..10)
                .map(|_| format!("g{g}w{}", rng.gen_range(0..10)))
                .collect()
        })
        .collect();
    (sentences, (0..20).map(|i| i / 10).collect())
}

#[test]
fn criterion_6_skipgram_sanity() {
    let start = Instant::now();
    let (sentences, _) = two_group_corpus();
    let params = SkipgramParams::default();
    let model = train_skipgram(&sentences, &params).unwrap();
    let again = train_skipgram(&sentences, &params).unwrap();
    let deterministic = model == again;

    let group = |t: &str| t.as_bytes()[1];
    let tokens = model.tokens().to_vec();
    let same = tokens
        .iter()
        .filter(|t| {
            // brute-force cosine ranking over the whole vocabulary
            let q = model.vector(t).unwrap();
            let best = tokens
                .iter()
                .filter(|o| o != t)
                .map(|o| (o, wv_enrich::embedding::cosine(q, model.vector(o).unwrap()).unwrap()))
                .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.cmp(a.0)))
                .unwrap();
            group(best.0) == group(t)
        })
        .count();
    let share = same as f64 / tokens.len() as f64;
    let elapsed = start.elapsed();
    verdict(
        6,
        "skip-gram sanity",
        tokens.len() == 20 && share >= 0.9 && deterministic && elapsed < Duration::from_secs(60),
        &format!(
            "{same}/{} tokens with same-group top-1 neighbour; deterministic: {deterministic}; {elapsed:?}",
            tokens.len()
        ),
    );
}

// ---------------------------------------------------------------------------
// 7. Reuters-21578 reproduction.

mod reuters {
    use super::*;
    use wv_enrich::corpus::{filter_short_subset, label_set, load_dataset, reuters, DatasetFormat};
    use wv_enrich::harness::{run_cv_with, ExperimentConfig, EvalResult, Significance};
    use wv_enrich::seed::{derive_seed, streams};

    fn significant_gain(r: &EvalResult) -> bool {
        r.enriched.micro > r.baseline.micro
            && matches!(r.micro_significance, Significance::Tested(w) if w.p_two_sided < 0.05)
    }

    #[test]
    fn criterion_7_reuters_reproduction() {
        let Some(dir) = std::env::var_os("REUTERS21578_DIR") else {
            report("[criterion 7] NOT RUN Reuters-21578 reproduction: REUTERS21578_DIR is not set");
            return;
        };
        let dir = std::path::PathBuf::from(dir);
        let all = load_dataset(&dir, DatasetFormat::ReutersSgml).unwrap();
        let earn: HashSet<String> = ["earn".to_string()].into();
        let subset = filter_short_subset(&all, 100, &earn).unwrap();
        let classes = label_set(&subset).len();
        let size_ok = classes == 93 && subset.len().abs_diff(3003) <= 50;

        let articles = reuters::read_path(&dir).unwrap();
        let sentences: Vec<Vec<String>> = articles
            .iter()
            .map(|a| wv_enrich::corpus::tokenize(&a.body))
            .filter(|t| !t.is_empty())
            .collect();
        let cfg = ExperimentConfig {
            dataset: dir.clone(),
            n: 3,
            k: 3,
            ..ExperimentConfig::default()
        };
        let embedding = train_skipgram(
            &sentences,
            &SkipgramParams {
                seed: derive_seed(cfg.seed, streams::EMBEDDING),
                ..SkipgramParams::default()
            },
        )
        .unwrap();

        let t = Instant::now();
        let mnb = run_cv_with(&subset, &embedding, &cfg).unwrap();
        let mnb_time = t.elapsed();
        let t = Instant::now();
        let svm = run_cv_with(
            &subset,
            &embedding,
            &ExperimentConfig {
                classifier: ClassifierKind::Svm,
                ..cfg.clone()
            },
        )
        .unwrap();
        let svm_time = t.elapsed();

        let pass = size_ok
            && (mnb.baseline.micro - 0.765).abs() <= 0.03
            && (svm.baseline.micro - 0.842).abs() <= 0.03
            && significant_gain(&mnb)
            && significant_gain(&svm)
            && mnb_time < Duration::from_secs(15 * 60)
            && svm_time < Duration::from_secs(4 * 3600);
        verdict(
            7,
            "Reuters-21578 reproduction",
            pass,
            &format!(
                "{} docs / {classes} classes; MNB {:.3} -> {:.3} (p {:?}, {mnb_time:?}); SVM {:.3} -> {:.3} (p {:?}, {svm_time:?})",
                subset.len(),
                mnb.baseline.micro,
                mnb.enriched.micro,
                mnb.micro_significance.p_value(),
                svm.baseline.micro,
                svm.enriched.micro,
                svm.micro_significance.p_value(),
            ),
        );
    }
}

// ---------------------------------------------------------------------------
// 8. Top-3 dominance.

#[test]
fn criterion_8_top3_dominance() {
    let corpus = SyntheticSpec {
        variant_rate: 0.85,
        unlabelled_sentences: 0,
        ..SyntheticSpec::default()
    }
    .generate();
    let sentences: Vec<&[String]> = corpus.documents.iter().map(|d| d.tokens.as_slice()).collect();
    let embedding = train_skipgram(
        &sentences,
        &SkipgramParams {
            dim: 20,
            epochs: 3,
            ..SkipgramParams::default()
        },
    )
    .unwrap();
    let plan = wv_enrich::corpus::FoldPlan::new(&corpus.documents, 2, 5, 8).unwrap();
    let cfg = EnrichmentConfig::new(2, 2);
    let mut violations = 0;
    let mut gaps = Vec::new();
    for classifier in [ClassifierKind::Mnb, ClassifierKind::Svm] {
        let exp = Experiment {
            docs: &corpus.documents,
            plan: &plan,
            embedding: &embedding,
            classifier,
            svm: SvmParams::default(),
            top_k: 1,
            model_cache: None,
        };
        let enricher = wv_enrich::enrichment::Enricher::new(&embedding);
        for (r, f) in plan.cells() {
            let cell = exp.prepare(r, f).unwrap();
            for enriched in [false, true] {
                let at = |k| {
                    let t = if enriched {
                        cell.enriched_tally(k, &enricher, cfg)
                    } else {
                        cell.baseline_tally(k)
                    };
                    micro_recall(&t).unwrap()
                };
                let (top1, top3) = (at(1), at(3));
                if top3 < top1 {
                    violations += 1;
                }
                gaps.push(top3 - top1);
            }
        }
    }
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    verdict(
        8,
        "top-3 dominance",
        violations == 0,
        &format!("{violations} cells with top-3 < top-1 over {} comparisons; mean gap {mean_gap:.3}", gaps.len()),
    );
}
