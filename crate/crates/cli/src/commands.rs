use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde_json::json;
use tmtext::explain::{explain_prediction, export_rules, RuleFormat};
use tmtext::learner::FitOptions;
use tmtext::metrics::{confidence_interval, macro_metrics};
use tmtext::model_file::{load_model, save_model};
use tmtext::rng::{derive_seed, StreamRng};
use tmtext::split::{make_splits, SplitPlan};
use tmtext::{BitDocument, MetricsReport, ModelBundle, MultiClassTm, RunSummary};

use crate::data::{self, Features};
use crate::{BenchArgs, CvArgs, EvalArgs, ExplainArgs, SplitName, TrainArgs, UsageError};

/// Writes to stdout, surfacing errors (a closed pipe in particular) instead
/// of panicking like `print!`.
macro_rules! out {
    ($($arg:tt)*) => {
        write!(std::io::stdout().lock(), $($arg)*)?
    };
}

macro_rules! outln {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)?
    };
}

fn fmt_acc(v: Option<f64>) -> String {
    v.map(|a| format!("{a:.4}")).unwrap_or_else(|| "-".into())
}

pub fn train(a: TrainArgs) -> Result<()> {
    let cfg = data::tokenizer(&a.text)?;
    let params = data::params(&a.machine)?;
    data::check_holdout(a.data.holdout)?;

    let loaded = data::load(&a.data)?;
    let (train, test) = data::train_test(loaded, a.data.holdout, params.seed)?;
    let Features { vocabulary, train: train_docs, test: test_docs } =
        data::featurize(&train, &test, &cfg, a.text.features)?;
    eprintln!(
        "{} training and {} test documents, {} features, {} classes",
        train_docs.len(),
        test_docs.len(),
        vocabulary.len(),
        train.corpus().class_labels().len()
    );

    let mut model = MultiClassTm::new(train.corpus().class_labels().to_vec(), vocabulary.len(), params)?;
    let options = FitOptions { parallel: a.machine.parallel, skip_train_accuracy: a.skip_train_acc };
    let history = model.fit(&train_docs, Some(&test_docs), options)?;
    for r in &history.records {
        outln!(
            "epoch {:>4}  train {}  test {}  {:.2}s",
            r.epoch,
            fmt_acc(r.train_accuracy),
            fmt_acc(r.test_accuracy),
            r.seconds
        );
    }

    save_model(&ModelBundle { model, vocabulary, tokenizer: cfg }, &a.out)?;
    if let Some(path) = &a.history {
        std::fs::write(path, history.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!("model written to {}", a.out.display());
    Ok(())
}

pub fn eval(a: EvalArgs) -> Result<()> {
    data::check_holdout(a.data.holdout)?;
    let bundle: ModelBundle = load_model(&a.model)?;
    let loaded = data::load(&a.data)?;
    let (train, test) = data::train_test(loaded, a.data.holdout, bundle.model.params().seed)?;
    let corpus = match a.split {
        SplitName::Train => train.into_corpus(),
        SplitName::Test => test,
    };
    if corpus.class_labels() != bundle.model.class_labels() {
        bail!(
            "dataset classes {:?} do not match model classes {:?}",
            corpus.class_labels(),
            bundle.model.class_labels()
        );
    }
    let docs = corpus.binarize(&bundle.vocabulary, &bundle.tokenizer).documents;
    let report = score(&bundle.model, &docs)?;
    if a.json {
        outln!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        out!("{}", report.render(bundle.model.class_labels()));
    }
    Ok(())
}

fn score(model: &MultiClassTm, docs: &[BitDocument]) -> Result<MetricsReport> {
    let predictions = model.classify_batch(docs)?;
    let labels: Vec<usize> = docs.iter().map(|d| d.label().expect("binarized corpus is labelled")).collect();
    Ok(macro_metrics(&predictions, &labels, model.n_classes())?)
}

pub fn cv(a: CvArgs) -> Result<()> {
    let cfg = data::tokenizer(&a.text)?;
    let params = data::params(&a.machine)?;
    if !(a.level > 0.0 && a.level < 1.0) {
        return Err(UsageError(format!("--level must be in (0, 1), got {}", a.level)).into());
    }
    let plan = SplitPlan::cross_validation(a.folds, a.repeats, params.seed);
    plan.validate().map_err(|e| UsageError(e.to_string()))?;

    let corpus = data::whole(data::load(&a.data)?)?;
    let splits = make_splits(&corpus.labels(), &plan)?;
    let options = FitOptions { parallel: a.machine.parallel, skip_train_accuracy: true };
    let reports = splits
        .par_iter()
        .enumerate()
        .map(|(i, split)| {
            let (train, test) = corpus.split(&split.train, &split.test);
            let features = data::featurize(&train, &test, &cfg, a.text.features)?;
            let run_params = params.clone().with_seed(derive_seed(params.seed, i as u64));
            let mut model =
                MultiClassTm::new(corpus.class_labels().to_vec(), features.vocabulary.len(), run_params)?;
            model.fit(&features.train, None, options)?;
            score(&model, &features.test)
        })
        .collect::<Result<Vec<_>>>()?;

    let metric = |f: fn(&MetricsReport) -> f64| reports.iter().map(f).collect::<Vec<_>>();
    let summaries: Vec<(&str, RunSummary)> = vec![
        ("accuracy", confidence_interval(&metric(|r| r.accuracy), a.level)?),
        ("macro_precision", confidence_interval(&metric(|r| r.macro_precision), a.level)?),
        ("macro_recall", confidence_interval(&metric(|r| r.macro_recall), a.level)?),
        ("macro_f1", confidence_interval(&metric(|r| r.macro_f1), a.level)?),
    ];

    if a.json {
        let runs: Vec<_> = splits
            .iter()
            .zip(&reports)
            .map(|(s, r)| json!({ "repeat": s.repeat, "fold": s.fold, "report": r }))
            .collect();
        let summary: serde_json::Map<_, _> =
            summaries.iter().map(|(name, s)| (name.to_string(), json!(s))).collect();
        outln!("{}", serde_json::to_string_pretty(&json!({ "runs": runs, "summary": summary }))?);
    } else {
        outln!("repeat\tfold\taccuracy\tmacro_f1");
        for (s, r) in splits.iter().zip(&reports) {
            outln!("{}\t{}\t{:.4}\t{:.4}", s.repeat, s.fold, r.accuracy, r.macro_f1);
        }
        for (name, s) in &summaries {
            outln!("{name:<16} {s}  ({:.0}% CI, n={})", a.level * 100.0, s.samples.len());
        }
    }
    Ok(())
}

pub fn explain(a: ExplainArgs) -> Result<()> {
    let bundle: ModelBundle = load_model(&a.model)?;
    let text = match (&a.text, &a.file) {
        (Some(t), _) => Some(t.clone()),
        (None, Some(path)) => {
            let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            Some(String::from_utf8_lossy(&bytes).into_owned())
        }
        (None, None) => None,
    };
    if let Some(text) = text {
        let e = explain_prediction(&bundle.model, &bundle.vocabulary, &text, &bundle.tokenizer)?;
        if a.json {
            outln!("{}", serde_json::to_string_pretty(&e)?);
        } else {
            out!("{e}");
        }
        return Ok(());
    }

    let reference = match a.reference.resolve()? {
        Some(args) => {
            data::check_holdout(args.holdout)?;
            let (train, _) = data::train_test(data::load(&args)?, args.holdout, bundle.model.params().seed)?;
            Some(train.corpus().binarize(&bundle.vocabulary, &bundle.tokenizer).documents)
        }
        None => None,
    };
    let format = if a.json { RuleFormat::Json } else { RuleFormat::Text };
    let out = export_rules(&bundle.model, &bundle.vocabulary, reference.as_deref(), format, a.top)?;
    out!("{out}");
    if a.json {
        outln!("");
    }
    Ok(())
}

/// Random documents whose label is the first bit, so training has signal.
fn synthetic(n: usize, k: usize, density: f64, seed: u64) -> Vec<BitDocument> {
    let mut rng = StreamRng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let bits: Vec<bool> = (0..k).map(|_| rng.gen_bool(density)).collect();
            let label = bits[0] as usize;
            BitDocument::from_bits(&bits).with_label(label)
        })
        .collect()
}

pub fn bench(a: BenchArgs) -> Result<()> {
    let params = data::params(&a.machine)?;
    let (labels, docs) = match a.data.resolve()? {
        Some(args) => {
            let cfg = data::tokenizer(&a.text)?;
            data::check_holdout(args.holdout)?;
            let (train, test) = data::train_test(data::load(&args)?, args.holdout, params.seed)?;
            (train.corpus().class_labels().to_vec(), data::featurize(&train, &test, &cfg, a.text.features)?.train)
        }
        None => {
            if a.docs == 0 || a.text.features == 0 || !(0.0..=1.0).contains(&a.density) {
                return Err(UsageError("--docs and --features must be positive, --density in [0, 1]".into()).into());
            }
            (vec!["0".into(), "1".into()], synthetic(a.docs, a.text.features, a.density, params.seed))
        }
    };
    let n_features = docs.first().map_or(0, |d| d.len());
    let mut model = MultiClassTm::new(labels, n_features, params.clone())?;

    let started = Instant::now();
    let options = FitOptions { parallel: a.machine.parallel, skip_train_accuracy: true };
    model.fit(&docs, None, options)?;
    let train_secs = started.elapsed().as_secs_f64();

    let started = Instant::now();
    model.classify_batch(&docs)?;
    let infer_secs = started.elapsed().as_secs_f64();

    let trained = (docs.len() * params.epochs) as f64;
    outln!(
        "{} documents, {} features, {} clauses per class, {} epochs",
        docs.len(),
        n_features,
        params.clauses,
        params.epochs
    );
    outln!("train     {:>12.1} docs/s  ({train_secs:.2}s)", trained / train_secs);
    outln!("inference {:>12.1} docs/s  ({infer_secs:.2}s)", docs.len() as f64 / infer_secs);
    Ok(())
}
