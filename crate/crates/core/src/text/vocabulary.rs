use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use super::tokenize::{tokenize, TokenizerConfig};
use super::RawCorpus;
use crate::document::BitDocument;
use crate::error::{Error, Result};

/// Ordered term list; position `j` is propositional variable `x_j`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from an ordered, duplicate-free term list.
    pub fn from_terms(terms: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate vocabulary term {t:?}")));
            }
        }
        Ok(Self { terms, index })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    #[inline]
    pub fn term(&self, j: usize) -> &str {
        &self.terms[j]
    }

    #[inline]
    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }
}

pub(crate) fn unique_terms(text: &str, cfg: &TokenizerConfig) -> HashSet<String> {
    tokenize(text, cfg).into_iter().collect()
}

/// Document frequency of every term in the corpus.
pub(crate) fn document_frequencies(corpus: &RawCorpus, cfg: &TokenizerConfig) -> HashMap<String, usize> {
    corpus
        .documents()
        .par_iter()
        .map(|d| unique_terms(&d.text, cfg))
        .fold(HashMap::new, |mut acc: HashMap<String, usize>, terms| {
            for t in terms {
                *acc.entry(t).or_default() += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (t, c) in b {
                *a.entry(t).or_default() += c;
            }
            a
        })
}

/// Terms ordered by descending document frequency, ties lexicographic.
pub(crate) fn ordered_terms(df: HashMap<String, usize>, min_df: usize) -> Vec<(String, usize)> {
    let mut terms: Vec<(String, usize)> = df.into_iter().filter(|&(_, c)| c >= min_df).collect();
    terms.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    terms
}

/// Unique terms with document frequency at least `min_document_frequency`,
/// by descending frequency then lexicographically.
pub fn build_vocabulary(corpus: &RawCorpus, cfg: &TokenizerConfig) -> Result<Vocabulary> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let terms = ordered_terms(document_frequencies(corpus, cfg), cfg.min_document_frequency);
    Vocabulary::from_terms(terms.into_iter().map(|(t, _)| t).collect())
}

/// Presence vector of `text` over `vocab`. Out-of-vocabulary terms are
/// dropped.
pub fn binarize(text: &str, vocab: &Vocabulary, cfg: &TokenizerConfig) -> BitDocument {
    BitDocument::from_indices(vocab.len(), tokenize(text, cfg).iter().filter_map(|t| vocab.index_of(t)))
}
