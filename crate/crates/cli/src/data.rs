//! Dataset resolution, splitting and featurization shared by the commands.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tmtext::dataset::{self, DatasetKind, DatasetSpec, Grouping, LoadedDataset};
use tmtext::split::{make_splits, SplitPlan};
use tmtext::text::{select_features, RawCorpus, TokenizerConfig, TrainSplit};
use tmtext::{BitDocument, HyperParams, Vocabulary};

use crate::{DataArgs, DatasetName, MachineArgs, TextArgs, UsageError};

/// Accepts either the dataset root itself or a directory holding it under
/// its usual name.
fn resolve_root(kind: DatasetName, dir: &Path) -> PathBuf {
    let candidates: &[&str] = match kind {
        DatasetName::Imdb if !dir.join("train").is_dir() => &["aclImdb"],
        DatasetName::Newsgroups => &["20news-19997", "20_newsgroups", "20news-18828"],
        _ => &[],
    };
    candidates.iter().map(|c| dir.join(c)).find(|p| p.is_dir()).unwrap_or_else(|| dir.to_path_buf())
}

pub fn load(args: &DataArgs) -> Result<LoadedDataset> {
    let grouping = match &args.grouping {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(Grouping::parse(&text)?)
        }
        None => None,
    };
    let kind = match args.dataset {
        DatasetName::Imdb => DatasetKind::Imdb,
        DatasetName::Newsgroups => DatasetKind::Newsgroups20,
        DatasetName::Dirs => DatasetKind::LabeledDirs,
    };
    let root = resolve_root(args.dataset, &args.data_dir);
    Ok(dataset::load(&DatasetSpec { kind, root, grouping })?)
}

pub fn check_holdout(fraction: f64) -> Result<(), UsageError> {
    if fraction > 0.0 && fraction < 1.0 {
        Ok(())
    } else {
        Err(UsageError(format!("--holdout must be in (0, 1), got {fraction}")))
    }
}

/// The published split when there is one, otherwise a stratified hold-out.
pub fn train_test(loaded: LoadedDataset, fraction: f64, seed: u64) -> Result<(TrainSplit, RawCorpus)> {
    match loaded {
        LoadedDataset::Presplit { train, test } => Ok((train, test)),
        LoadedDataset::Whole(corpus) => {
            let split = make_splits(&corpus.labels(), &SplitPlan::hold_out(fraction, seed))?
                .into_iter()
                .next()
                .expect("hold-out yields one split");
            Ok(corpus.split(&split.train, &split.test))
        }
    }
}

/// All documents of a dataset as one corpus, train before test.
pub fn whole(loaded: LoadedDataset) -> Result<RawCorpus> {
    match loaded {
        LoadedDataset::Whole(corpus) => Ok(corpus),
        LoadedDataset::Presplit { train, test } => {
            let train = train.into_corpus();
            let labels = train.class_labels().to_vec();
            let mut docs = train.documents().to_vec();
            docs.extend_from_slice(test.documents());
            Ok(RawCorpus::new(docs, labels)?)
        }
    }
}

pub fn tokenizer(args: &TextArgs) -> Result<TokenizerConfig, UsageError> {
    let cfg = TokenizerConfig { min_document_frequency: args.min_df, ..TokenizerConfig::default() }
        .with_ngrams(args.ngrams.iter().copied());
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    if args.features == 0 {
        return Err(UsageError("--features must be at least 1".into()));
    }
    Ok(cfg)
}

pub fn params(args: &MachineArgs) -> Result<HyperParams, UsageError> {
    let params = HyperParams::new(args.clauses, args.states, args.s, args.threshold)
        .with_epochs(args.epochs)
        .with_seed(args.seed);
    params.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(params)
}

pub struct Features {
    pub vocabulary: Vocabulary,
    pub train: Vec<BitDocument>,
    pub test: Vec<BitDocument>,
}

/// Selects `top_k` terms on the training split and binarizes both sides.
pub fn featurize(train: &TrainSplit, test: &RawCorpus, cfg: &TokenizerConfig, top_k: usize) -> Result<Features> {
    let selection = select_features::<f64>(train, cfg, top_k)?;
    if selection.truncated {
        eprintln!("note: only {} candidate terms, all of them kept", selection.vocabulary.len());
    }
    let train_docs = train.corpus().binarize(&selection.vocabulary, cfg).documents;
    let test_docs = test.binarize(&selection.vocabulary, cfg).documents;
    Ok(Features { vocabulary: selection.vocabulary, train: train_docs, test: test_docs })
}
