use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    /// Map every character that is neither alphanumeric nor whitespace to a
    /// space before splitting.
    pub strip_punctuation: bool,
    /// Word n-gram sizes to emit, e.g. `{1, 4}` for unigrams and quadrigrams.
    pub ngram_sizes: BTreeSet<usize>,
    pub min_document_frequency: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            strip_punctuation: true,
            ngram_sizes: BTreeSet::from([1]),
            min_document_frequency: 1,
        }
    }
}

impl TokenizerConfig {
    /// Preset used for the benchmark corpora: document-frequency floor of 2.
    pub fn benchmark() -> Self {
        Self { min_document_frequency: 2, ..Self::default() }
    }

    pub fn with_ngrams(mut self, sizes: impl IntoIterator<Item = usize>) -> Self {
        self.ngram_sizes = sizes.into_iter().collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.ngram_sizes.is_empty() {
            return Err(Error::InvalidTokenizer("ngram_sizes is empty".into()));
        }
        if self.ngram_sizes.contains(&0) {
            return Err(Error::InvalidTokenizer("n-gram size 0".into()));
        }
        if self.min_document_frequency == 0 {
            return Err(Error::InvalidTokenizer("min_document_frequency must be >= 1".into()));
        }
        Ok(())
    }
}

/// Splits `text` into terms. N-grams of each configured size follow in
/// ascending size order; constituent tokens are joined with `_`.
pub fn tokenize(text: &str, cfg: &TokenizerConfig) -> Vec<String> {
    let mut cleaned = if cfg.lowercase { text.to_lowercase() } else { text.to_owned() };
    if cfg.strip_punctuation {
        cleaned = cleaned
            .chars()
            .map(|c| if c.is_alphanumeric() || c.is_whitespace() { c } else { ' ' })
            .collect();
    }
    let words: Vec<&str> = cleaned.split_whitespace().collect();
    let mut terms = Vec::new();
    for &n in &cfg.ngram_sizes {
        if n == 0 || n > words.len() {
            continue;
        }
        terms.extend(words.windows(n).map(|w| w.join("_")));
    }
    terms
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unigrams() {
        let cfg = TokenizerConfig::default();
        assert_eq!(tokenize("Reacts to Voltaren.", &cfg), ["reacts", "to", "voltaren"]);
    }

    #[test]
    fn unigrams_and_bigrams() {
        let cfg = TokenizerConfig::default().with_ngrams([1, 2]);
        assert_eq!(
            tokenize("Reacts to Voltaren.", &cfg),
            ["reacts", "to", "voltaren", "reacts_to", "to_voltaren"]
        );
    }

    #[test]
    fn quadrigrams_need_four_words() {
        let cfg = TokenizerConfig::default().with_ngrams([4]);
        assert!(tokenize("one two three", &cfg).is_empty());
        assert_eq!(tokenize("a b c d e", &cfg), ["a_b_c_d", "b_c_d_e"]);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("", &TokenizerConfig::default()).is_empty());
        assert!(tokenize("  ...  !", &TokenizerConfig::default()).is_empty());
    }

    #[test]
    fn raw_mode_keeps_case_and_punctuation() {
        let cfg = TokenizerConfig { lowercase: false, strip_punctuation: false, ..Default::default() };
        assert_eq!(tokenize("Hi, There", &cfg), ["Hi,", "There"]);
    }

    #[test]
    fn unicode_whitespace_and_punctuation() {
        let cfg = TokenizerConfig::default();
        assert_eq!(tokenize("Ärger\u{00a0}—über«x»", &cfg), ["ärger", "über", "x"]);
    }

    #[test]
    fn validation() {
        assert!(TokenizerConfig::default().validate().is_ok());
        assert!(TokenizerConfig::default().with_ngrams([]).validate().is_err());
        assert!(TokenizerConfig::default().with_ngrams([0]).validate().is_err());
        let cfg = TokenizerConfig { min_document_frequency: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
