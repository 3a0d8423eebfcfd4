use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wv_enrich::corpus::{load_dataset, write_records, DatasetFormat};
use wv_enrich::embedding::EmbeddingModel;
use wv_enrich::synthetic::SyntheticSpec;

fn wv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wv-enrich"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn has_row(table: &str, model: &str, n: &str, k: &str) -> bool {
    table
        .lines()
        .any(|l| l.split_whitespace().take(3).eq([model, n, k]))
}

fn write_dataset(dir: &Path) -> String {
    let corpus = SyntheticSpec {
        classes: 3,
        docs_per_class: vec![12, 10, 8],
        unlabelled_sentences: 0,
        ..SyntheticSpec::default()
    }
    .generate();
    let path = dir.join("docs.jsonl");
    write_records(&corpus.documents, fs::File::create(&path).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn prep_filters_and_counts() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let out = dir.path().join("short.jsonl");
    let o = wv(&[
        "prep", &data, "--max-tokens", "11", "--exclude-label", "topic00",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stderr(&o).trim(), "18 documents, 2 classes");
    let docs = load_dataset(&out, DatasetFormat::Records).unwrap();
    assert_eq!(docs.len(), 18);
    assert!(docs.iter().all(|d| !d.has_label("topic00")));
}

#[test]
fn train_embedding_writes_word2vec_text() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let out = dir.path().join("vectors.txt");
    let run = || {
        wv(&[
            "train-embedding", "--input", &data, "--dim", "8", "--epochs", "2", "--seed", "5",
            "--out", out.to_str().unwrap(),
        ])
    };
    let o = run();
    assert!(o.status.success(), "{}", stderr(&o));
    let first = fs::read(&out).unwrap();
    let model = EmbeddingModel::load_word2vec_text(&out).unwrap();
    assert_eq!(model.dim(), 8);
    assert!(model.contains("fill0"));
    assert!(run().status.success());
    assert_eq!(fs::read(&out).unwrap(), first);
}

#[test]
fn evaluate_and_grid_search() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let o = wv(&[
        "evaluate", &data, "--classifier", "mnb", "--train-domain", "--n", "2", "--k", "1",
        "--repeats", "1", "--folds", "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    assert!(table.starts_with("# 1x3-fold cross validation, seed 42"), "{table}");
    assert!(has_row(&table, "MNB", "2", "1"), "{table}");

    let report = dir.path().join("out/grid.jsonl");
    let o = wv(&[
        "grid-search", &data, "--classifier", "svm", "--n-range", "1..2", "--k-range", "1,3",
        "--repeats", "1", "--folds", "3", "--report", report.to_str().unwrap(),
        "--report-format", "records",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&report).unwrap().lines().count(), 3);
}

#[test]
fn flags_override_config_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        format!("dataset = {data:?}\nrepeats = 1\nfolds = 3\nseed = 7\nn = 4\n"),
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let o = wv(&["evaluate", "--config", cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    assert!(table.starts_with("# 1x3-fold cross validation, seed 7"), "{table}");
    // n from the file, k from the default
    assert!(has_row(&table, "MNB", "4", "3"), "{table}");

    let o = wv(&["evaluate", "--config", cfg, "--seed", "9", "--k", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    assert!(table.starts_with("# 1x3-fold cross validation, seed 9"), "{table}");
    assert!(has_row(&table, "MNB", "4", "2"), "{table}");
}

#[test]
fn errors_exit_nonzero_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.jsonl");
    let o = wv(&["evaluate", missing.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("wv-enrich: error: "), "{}", stderr(&o));

    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"id\": \"a\", \"text\": \"x\", \"labels\": [\"l\"]}\nnot json\n").unwrap();
    let o = wv(&["prep", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let cfg = dir.path().join("typo.toml");
    fs::write(&cfg, "repeets = 3\n").unwrap();
    let o = wv(&["evaluate", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("repeets"), "{}", stderr(&o));

    let data = write_dataset(dir.path());
    let o = wv(&["grid-search", &data, "--n-range", "1,2"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("--k-range"), "{}", stderr(&o));

    let o = wv(&["evaluate", &data, "--classifier", "knn"]);
    assert!(!o.status.success());
}
