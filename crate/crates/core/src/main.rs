use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wv_enrich::corpus::{
    filter_short_subset, label_set, load_dataset, reuters, tokenize, write_records, DatasetFormat,
};
use wv_enrich::embedding::{train_skipgram, SkipgramParams};
use wv_enrich::harness::{
    parse_range_list, render, run_cv, ClassifierKind, EmbeddingSource, ExperimentConfig,
    ReportFormat,
};
use wv_enrich::{Error, Result};

/// Short-text classification with word-vector enrichment.
#[derive(Parser)]
#[command(name = "wv-enrich", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a dataset to records, optionally keeping only short documents.
    Prep(PrepArgs),
    /// Train a skip-gram embedding and save it in word2vec text format.
    TrainEmbedding(TrainArgs),
    /// Cross-validate baseline against enriched classification.
    Evaluate(EvaluateArgs),
    /// Pick (n, k) by grid search, then cross-validate at the chosen point.
    GridSearch(GridArgs),
}

#[derive(Args)]
struct Common {
    /// TOML file with experiment settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// records or reuters-sgml
    #[arg(long)]
    format: Option<DatasetFormat>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(f) = self.format {
            cfg.format = f;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct PrepArgs {
    /// Dataset file or Reuters directory (default: `dataset` from the config).
    input: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
    /// Keep documents with at most this many tokens.
    #[arg(long)]
    max_tokens: Option<usize>,
    /// Drop documents carrying this label; repeatable.
    #[arg(long = "exclude-label")]
    exclude_labels: Vec<String>,
    /// Output records file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Training text (default: `dataset` from the config).
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    min_count: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Training seed, used as given.
    #[arg(long)]
    seed: Option<u64>,
    /// Output word2vec text file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Dataset file or Reuters directory (default: `dataset` from the config).
    dataset: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
    /// mnb or svm
    #[arg(long)]
    classifier: Option<ClassifierKind>,
    /// Pretrained word2vec text model.
    #[arg(long, conflicts_with = "train_domain")]
    embedding: Option<PathBuf>,
    /// Train the embedding on the dataset itself.
    #[arg(long)]
    train_domain: bool,
    #[arg(long)]
    svm_c: Option<f64>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    /// Master seed for folds, embedding and SVM.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    top_k: Option<usize>,
    /// Directory for cached per-fold classifiers.
    #[arg(long)]
    model_cache: Option<PathBuf>,
    /// Report file (default: stdout).
    #[arg(long)]
    report: Option<PathBuf>,
    /// table-text or records
    #[arg(long, default_value = "table-text")]
    report_format: ReportFormat,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    eval: EvalArgs,
    /// Rare-word threshold.
    #[arg(long)]
    n: Option<u64>,
    /// Neighbours per rare word.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    eval: EvalArgs,
    /// Candidate n values, e.g. `1..5` or `1,3,5`.
    #[arg(long)]
    n_range: Option<String>,
    /// Candidate k values.
    #[arg(long)]
    k_range: Option<String>,
}

impl EvalArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = self.common.load()?;
        if let Some(d) = &self.dataset {
            cfg.dataset = d.clone();
        }
        if let Some(c) = self.classifier {
            cfg.classifier = c;
        }
        if let Some(p) = &self.embedding {
            cfg.embedding = EmbeddingSource::Load(p.clone());
        } else if self.train_domain {
            cfg.embedding = EmbeddingSource::TrainDomain;
        }
        set(&mut cfg.svm_c, self.svm_c);
        set(&mut cfg.repeats, self.repeats);
        set(&mut cfg.folds, self.folds);
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.top_k, self.top_k);
        if let Some(dir) = &self.model_cache {
            cfg.model_cache = Some(dir.clone());
        }
        Ok(cfg)
    }

    fn emit(&self, cfg: &ExperimentConfig) -> Result<()> {
        let result = run_cv(cfg)?;
        let text = render(&result, self.report_format)?;
        match &self.report {
            Some(path) => write_file(path, text.as_bytes()),
            None => write_stdout(text.as_bytes()),
        }
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn write_stdout(bytes: &[u8]) -> Result<()> {
    io::stdout()
        .lock()
        .write_all(bytes)
        .map_err(|e| io_error(Path::new("<stdout>"), e))
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn dataset_path(given: &Option<PathBuf>, cfg: &ExperimentConfig) -> Result<PathBuf> {
    match given {
        Some(p) => Ok(p.clone()),
        None if !cfg.dataset.as_os_str().is_empty() => Ok(cfg.dataset.clone()),
        None => Err(Error::InvalidArgument("no dataset given".into())),
    }
}

fn prep(args: &PrepArgs) -> Result<()> {
    let cfg = args.common.load()?;
    let input = dataset_path(&args.input, &cfg)?;
    let docs = load_dataset(&input, cfg.format)?;
    let excluded: HashSet<String> = args.exclude_labels.iter().cloned().collect();
    let kept = filter_short_subset(&docs, args.max_tokens.unwrap_or(usize::MAX), &excluded)?;
    let classes = label_set(&kept).len();
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_error(path, e))?;
            let mut out = BufWriter::new(file);
            write_records(&kept, &mut out)
                .and_then(|_| out.flush())
                .map_err(|e| io_error(path, e))?;
            eprintln!("{} documents, {classes} classes", kept.len());
        }
        None => {
            let mut out = BufWriter::new(io::stdout().lock());
            write_records(&kept, &mut out)
                .and_then(|_| out.flush())
                .map_err(|e| io_error(Path::new("<stdout>"), e))?;
            eprintln!("{} documents, {classes} classes", kept.len());
        }
    }
    Ok(())
}

fn train(args: &TrainArgs) -> Result<()> {
    let cfg = args.common.load()?;
    let input = dataset_path(&args.input, &cfg)?;
    let params = SkipgramParams {
        dim: args.dim.unwrap_or(cfg.skipgram.dim),
        window: args.window.unwrap_or(cfg.skipgram.window),
        min_count: args.min_count.unwrap_or(cfg.skipgram.min_count),
        epochs: args.epochs.unwrap_or(cfg.skipgram.epochs),
        seed: args.seed.unwrap_or(cfg.skipgram.seed),
        ..cfg.skipgram.clone()
    };
    // every article body counts as text, labelled or not
    let sentences: Vec<Vec<String>> = match cfg.format {
        DatasetFormat::ReutersSgml => reuters::read_path(&input)?
            .iter()
            .map(|a| tokenize(&a.body))
            .filter(|t| !t.is_empty())
            .collect(),
        DatasetFormat::Records => load_dataset(&input, cfg.format)?
            .into_iter()
            .map(|d| d.tokens)
            .collect(),
    };
    let model = train_skipgram(&sentences, &params)?;
    model.save_word2vec_text(&args.out)?;
    eprintln!("{} tokens, {} dimensions", model.len(), model.dim());
    Ok(())
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let mut cfg = args.eval.config()?;
    set(&mut cfg.n, args.n);
    set(&mut cfg.k, args.k);
    cfg.n_range = None;
    cfg.k_range = None;
    args.eval.emit(&cfg)
}

fn grid_search(args: &GridArgs) -> Result<()> {
    let mut cfg = args.eval.config()?;
    if let Some(s) = &args.n_range {
        cfg.n_range = Some(parse_range_list(s)?);
    }
    if let Some(s) = &args.k_range {
        cfg.k_range = Some(parse_range_list(s)?);
    }
    if cfg.grid().is_none() {
        return Err(Error::InvalidArgument(
            "grid search needs --n-range and --k-range".into(),
        ));
    }
    args.eval.emit(&cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Prep(a) => prep(&a),
        Command::TrainEmbedding(a) => train(&a),
        Command::Evaluate(a) => evaluate(&a),
        Command::GridSearch(a) => grid_search(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wv-enrich: error: {e}");
            ExitCode::FAILURE
        }
    }
}
