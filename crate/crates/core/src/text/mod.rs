//! Raw text to propositional documents: tokenization, vocabulary,
//! binarization and information-gain feature selection.

mod infogain;
mod tokenize;
mod vocabulary;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use infogain::{information_gain, select_features, FeatureSelection};
pub use tokenize::{tokenize, TokenizerConfig};
pub use vocabulary::{binarize, build_vocabulary, Vocabulary};

use crate::document::BitDocument;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub text: String,
    pub label: usize,
    /// Where the text came from (file path or synthetic id).
    pub source: String,
}

impl RawDocument {
    pub fn new(text: impl Into<String>, label: usize, source: impl Into<String>) -> Self {
        Self { text: text.into(), label, source: source.into() }
    }
}

/// Labelled texts with their ordered class names.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawCorpus {
    documents: Vec<RawDocument>,
    class_labels: Vec<String>,
}

impl RawCorpus {
    pub fn new(documents: Vec<RawDocument>, class_labels: Vec<String>) -> Result<Self> {
        if let Some(d) = documents.iter().find(|d| d.label >= class_labels.len()) {
            return Err(Error::UnknownLabel(format!("{} (in {})", d.label, d.source)));
        }
        Ok(Self { documents, class_labels })
    }

    #[inline]
    pub fn documents(&self) -> &[RawDocument] {
        &self.documents
    }

    #[inline]
    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.documents.iter().map(|d| d.label).collect()
    }

    /// Sub-corpus at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> RawCorpus {
        RawCorpus {
            documents: indices.iter().map(|&i| self.documents[i].clone()).collect(),
            class_labels: self.class_labels.clone(),
        }
    }

    /// Splits into training and held-out parts by index.
    pub fn split(&self, train: &[usize], test: &[usize]) -> (TrainSplit, RawCorpus) {
        (TrainSplit(self.subset(train)), self.subset(test))
    }

    pub fn binarize(&self, vocab: &Vocabulary, cfg: &TokenizerConfig) -> Corpus {
        let documents =
            self.documents.par_iter().map(|d| binarize(&d.text, vocab, cfg).with_label(d.label)).collect();
        Corpus {
            documents,
            class_labels: self.class_labels.clone(),
            provenance: self.documents.iter().map(|d| d.source.clone()).collect(),
        }
    }
}

/// The training side of a split. Feature selection only accepts this type,
/// so held-out documents cannot leak into term statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainSplit(RawCorpus);

impl TrainSplit {
    /// Declares a whole corpus to be training data.
    pub fn from_corpus(corpus: RawCorpus) -> Self {
        Self(corpus)
    }

    #[inline]
    pub fn corpus(&self) -> &RawCorpus {
        &self.0
    }

    pub fn into_corpus(self) -> RawCorpus {
        self.0
    }
}

/// Binarized documents with class names and per-document provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<BitDocument>,
    pub class_labels: Vec<String>,
    pub provenance: Vec<String>,
}
