//! Information-gain scoring and top-k feature selection.

use std::collections::HashMap;

use rayon::prelude::*;

use super::tokenize::TokenizerConfig;
use super::vocabulary::{ordered_terms, unique_terms, Vocabulary};
use super::TrainSplit;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Base-2 entropy of a count distribution with the given total.
fn entropy<F: Scalar>(counts: impl IntoIterator<Item = usize>, total: usize) -> F {
    if total == 0 {
        return F::zero();
    }
    let total = F::from_usize_lossy(total);
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = F::from_usize_lossy(c) / total;
            -p * p.log2()
        })
        .fold(F::zero(), |a, b| a + b)
}

/// IG from per-class totals and per-class counts of documents where the
/// feature is present.
pub(crate) fn information_gain_from_counts<F: Scalar>(class_totals: &[usize], present: &[usize]) -> F {
    let n: usize = class_totals.iter().sum();
    if n == 0 {
        return F::zero();
    }
    let n_present: usize = present.iter().sum();
    let n_absent = n - n_present;
    let absent = class_totals.iter().zip(present).map(|(&t, &p)| t - p);
    let nf = F::from_usize_lossy(n);
    let h_y: F = entropy(class_totals.iter().copied(), n);
    let h_present: F = entropy(present.iter().copied(), n_present);
    let h_absent: F = entropy(absent, n_absent);
    let conditional =
        F::from_usize_lossy(n_present) / nf * h_present + F::from_usize_lossy(n_absent) / nf * h_absent;
    (h_y - conditional).max(F::zero())
}

/// `H(Y) - H(Y | X)` in bits for a binary feature.
pub fn information_gain<F: Scalar>(feature_bits: &[bool], labels: &[usize]) -> Result<F> {
    if feature_bits.len() != labels.len() {
        return Err(Error::LengthMismatch { left: feature_bits.len(), right: labels.len() });
    }
    if labels.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, found: 0 });
    }
    let n_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut totals = vec![0usize; n_classes];
    let mut present = vec![0usize; n_classes];
    for (&bit, &y) in feature_bits.iter().zip(labels) {
        totals[y] += 1;
        if bit {
            present[y] += 1;
        }
    }
    Ok(information_gain_from_counts(&totals, &present))
}

#[derive(Debug, Clone)]
pub struct FeatureSelection<F = f64> {
    /// Selected terms, highest score first.
    pub vocabulary: Vocabulary,
    /// Score of each selected term, aligned with `vocabulary`.
    pub scores: Vec<F>,
    /// Set when `top_k` exceeded the number of candidate terms and the full
    /// vocabulary was returned.
    pub truncated: bool,
}

/// Scores every vocabulary term by information gain on the training split and
/// keeps the `top_k` best. Ties keep the vocabulary's own order.
pub fn select_features<F: Scalar>(
    train: &TrainSplit,
    cfg: &TokenizerConfig,
    top_k: usize,
) -> Result<FeatureSelection<F>> {
    cfg.validate()?;
    if top_k == 0 {
        return Err(Error::InvalidTokenizer("top_k must be at least 1".into()));
    }
    let corpus = train.corpus();
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n_classes = corpus.class_labels().len();
    let doc_terms: Vec<_> = corpus.documents().par_iter().map(|d| unique_terms(&d.text, cfg)).collect();

    let mut df: HashMap<String, usize> = HashMap::new();
    for terms in &doc_terms {
        for t in terms {
            *df.entry(t.clone()).or_default() += 1;
        }
    }
    let ordered = ordered_terms(df, cfg.min_document_frequency);
    let position: HashMap<&str, usize> = ordered.iter().enumerate().map(|(i, (t, _))| (t.as_str(), i)).collect();

    let mut totals = vec![0usize; n_classes];
    let mut present = vec![0usize; ordered.len() * n_classes];
    for (terms, doc) in doc_terms.iter().zip(corpus.documents()) {
        totals[doc.label] += 1;
        for t in terms {
            if let Some(&j) = position.get(t.as_str()) {
                present[j * n_classes + doc.label] += 1;
            }
        }
    }
    let scores: Vec<F> = (0..ordered.len())
        .into_par_iter()
        .map(|j| information_gain_from_counts(&totals, &present[j * n_classes..(j + 1) * n_classes]))
        .collect();

    let mut ranked: Vec<usize> = (0..ordered.len()).collect();
    ranked.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(std::cmp::Ordering::Equal));
    let truncated = top_k > ranked.len();
    ranked.truncate(top_k);

    let terms = ranked.iter().map(|&j| ordered[j].0.clone()).collect();
    Ok(FeatureSelection {
        vocabulary: Vocabulary::from_terms(terms)?,
        scores: ranked.iter().map(|&j| scores[j]).collect(),
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{build_vocabulary, RawCorpus, RawDocument};

    fn ig(bits: &[u8], labels: &[usize]) -> f64 {
        let bits: Vec<bool> = bits.iter().map(|&b| b == 1).collect();
        information_gain(&bits, labels).unwrap()
    }

    #[test]
    fn perfectly_informative() {
        assert!((ig(&[1, 1, 0, 0], &[1, 1, 0, 0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn independent_feature() {
        assert!(ig(&[1, 0, 1, 0], &[1, 1, 0, 0]).abs() < 1e-15);
    }

    #[test]
    fn partial_split() {
        // H(1/2,1/2) - 3/4 H(2/3,1/3), worked by hand: 1 - 0.75 * 0.918295834... = 0.311278124...
        let expected = 1.0 - 0.75 * (-(2.0f64 / 3.0) * (2.0f64 / 3.0).log2() - (1.0 / 3.0) * (1.0f64 / 3.0).log2());
        assert!((ig(&[1, 1, 1, 0], &[1, 1, 0, 0]) - expected).abs() < 1e-12);
        assert!((expected - 0.3113).abs() < 1e-4);
    }

    #[test]
    fn errors() {
        assert!(information_gain::<f64>(&[true], &[0, 1]).is_err());
        assert!(information_gain::<f64>(&[], &[]).is_err());
    }

    #[test]
    fn f32_agrees() {
        let a: f32 = information_gain(&[true, true, true, false], &[1, 1, 0, 0]).unwrap();
        assert!((a as f64 - 0.311278).abs() < 1e-5);
    }

    fn toy() -> TrainSplit {
        // "signal" appears exactly in class 1
        let docs = [
            ("signal common alpha", 1),
            ("signal common beta", 1),
            ("signal gamma", 1),
            ("common alpha", 0),
            ("beta gamma", 0),
            ("common delta", 0),
        ];
        TrainSplit::from_corpus(
            RawCorpus::new(
                docs.iter().enumerate().map(|(i, (t, l))| RawDocument::new(*t, *l, i.to_string())).collect(),
                vec!["neg".into(), "pos".into()],
            )
            .unwrap(),
        )
    }

    #[test]
    fn predictive_term_ranks_first() {
        let sel: FeatureSelection<f64> = select_features(&toy(), &TokenizerConfig::default(), 3).unwrap();
        assert_eq!(sel.vocabulary.term(0), "signal");
        assert!((sel.scores[0] - 1.0).abs() < 1e-12);
        assert!(!sel.truncated);
        assert_eq!(sel.vocabulary.len(), 3);
    }

    #[test]
    fn full_size_selection_is_identity_set() {
        let train = toy();
        let cfg = TokenizerConfig::default();
        let full = build_vocabulary(train.corpus(), &cfg).unwrap();
        let sel: FeatureSelection<f64> = select_features(&train, &cfg, full.len()).unwrap();
        let mut a = full.terms().to_vec();
        let mut b = sel.vocabulary.terms().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);

        let over: FeatureSelection<f64> = select_features(&train, &cfg, full.len() + 5).unwrap();
        assert!(over.truncated);
        assert_eq!(over.vocabulary.len(), full.len());
    }

    #[test]
    fn label_constant_corpus_falls_back_to_vocabulary_order() {
        let raw = RawCorpus::new(
            ["b a", "a c", "a b d"].iter().enumerate().map(|(i, t)| RawDocument::new(*t, 0, i.to_string())).collect(),
            vec!["only".into()],
        )
        .unwrap();
        let train = TrainSplit::from_corpus(raw);
        let cfg = TokenizerConfig::default();
        let sel: FeatureSelection<f64> = select_features(&train, &cfg, 4).unwrap();
        assert!(sel.scores.iter().all(|&s| s == 0.0));
        assert_eq!(sel.vocabulary, build_vocabulary(train.corpus(), &cfg).unwrap());
    }
}
