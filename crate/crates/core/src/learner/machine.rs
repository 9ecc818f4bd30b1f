//! Single-class Tsetlin Machine: a balanced pool of positive and negative
//! clauses voting on one target.

use rand::Rng;
use rayon::prelude::*;

use super::feedback::{feedback_activation_probability, type_i_feedback, type_ii_feedback, FeedbackKind};
use crate::automata::check_states_per_action;
use crate::clause::{Clause, EvalMode, Polarity};
use crate::document::BitDocument;
use crate::error::{Error, Result};
use crate::rng::substream;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams<F = f64> {
    /// Clauses per class `m`, split evenly between the two polarities.
    pub clauses: usize,
    /// States per action `N`.
    pub states_per_action: usize,
    /// Specificity `s`.
    pub specificity: F,
    /// Vote threshold `T`.
    pub threshold: u32,
    pub epochs: usize,
    pub seed: u64,
}

impl<F: Scalar> HyperParams<F> {
    pub fn new(clauses: usize, states_per_action: usize, specificity: F, threshold: u32) -> Self {
        Self { clauses, states_per_action, specificity, threshold, epochs: 1, seed: 0 }
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.clauses == 0 || !self.clauses.is_multiple_of(2) {
            return Err(Error::InvalidClauseCount(self.clauses));
        }
        check_states_per_action(self.states_per_action)?;
        if !(self.specificity.is_finite() && self.specificity >= F::one()) {
            return Err(Error::InvalidSpecificity(self.specificity.to_f64_lossy()));
        }
        if self.threshold == 0 {
            return Err(Error::ZeroThreshold);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsetlinMachine<F = f64> {
    clauses: Vec<Clause>,
    params: HyperParams<F>,
    n_features: usize,
}

impl<F: Scalar> TsetlinMachine<F> {
    pub fn new<R: Rng + ?Sized>(n_features: usize, params: HyperParams<F>, rng: &mut R) -> Result<Self> {
        params.validate()?;
        let clauses = (0..params.clauses)
            .map(|i| Clause::new(n_features, params.states_per_action, Polarity::for_ordinal(i), rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { clauses, params, n_features })
    }

    /// Reassembles a machine from stored clauses.
    pub fn from_clauses(n_features: usize, params: HyperParams<F>, clauses: Vec<Clause>) -> Result<Self> {
        params.validate()?;
        if clauses.len() != params.clauses {
            return Err(Error::Malformed(format!(
                "expected {} clauses, found {}",
                params.clauses,
                clauses.len()
            )));
        }
        let positive = clauses.iter().filter(|c| c.polarity() == Polarity::Positive).count();
        if positive * 2 != clauses.len() {
            return Err(Error::Malformed("clause polarities are not balanced".into()));
        }
        for c in &clauses {
            if c.n_features() != n_features {
                return Err(Error::DimensionMismatch { expected: n_features, found: c.n_features() });
            }
            if c.states_per_action() != params.states_per_action {
                return Err(Error::Malformed("clause state count differs from hyperparameters".into()));
            }
        }
        Ok(Self { clauses, params, n_features })
    }

    #[inline]
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    #[inline]
    pub fn params(&self) -> &HyperParams<F> {
        &self.params
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    fn check(&self, doc: &BitDocument) -> Result<()> {
        if doc.len() != self.n_features {
            return Err(Error::DimensionMismatch { expected: self.n_features, found: doc.len() });
        }
        Ok(())
    }

    /// Positive-clause firings minus negative-clause firings.
    pub fn vote_sum(&self, doc: &BitDocument, mode: EvalMode) -> Result<i32> {
        self.check(doc)?;
        Ok(self.vote_sum_unchecked(doc, mode))
    }

    pub(crate) fn vote_sum_unchecked(&self, doc: &BitDocument, mode: EvalMode) -> i32 {
        self.clauses
            .iter()
            .filter(|c| c.evaluate_unchecked(doc, mode))
            .map(|c| c.polarity().sign())
            .sum()
    }

    /// 1 iff the inference vote sum is strictly positive.
    pub fn classify(&self, doc: &BitDocument) -> Result<bool> {
        Ok(self.vote_sum(doc, EvalMode::Inference)? > 0)
    }

    /// One game round on a labelled document. Returns the number of clauses
    /// that received feedback.
    pub fn train_example<R: Rng + ?Sized>(&mut self, doc: &BitDocument, y: bool, rng: &mut R) -> Result<usize> {
        self.check(doc)?;
        Ok(self.train_with_seed(doc, y, rng.next_u64(), false))
    }

    /// As [`train_example`](Self::train_example), updating clauses on the
    /// rayon pool. Produces the same states as the serial path.
    pub fn train_example_parallel<R: Rng + ?Sized>(
        &mut self,
        doc: &BitDocument,
        y: bool,
        rng: &mut R,
    ) -> Result<usize> {
        self.check(doc)?;
        Ok(self.train_with_seed(doc, y, rng.next_u64(), true))
    }

    pub(crate) fn train_with_seed(&mut self, doc: &BitDocument, y: bool, example_seed: u64, parallel: bool) -> usize {
        let f = self.vote_sum_unchecked(doc, EvalMode::Learning);
        let kind = if y { FeedbackKind::TypeI } else { FeedbackKind::TypeII };
        let p = feedback_activation_probability::<F>(f, self.params.threshold, kind);
        if p == F::zero() {
            return 0;
        }
        let s = self.params.specificity;
        let update = |(i, clause): (usize, &mut Clause)| -> usize {
            let mut rng = substream(example_seed, i as u64);
            if F::unit_draw(&mut rng) >= p {
                return 0;
            }
            match (y, clause.polarity()) {
                (true, Polarity::Positive) | (false, Polarity::Negative) => {
                    type_i_feedback(clause, doc, s, &mut rng)
                }
                (true, Polarity::Negative) | (false, Polarity::Positive) => {
                    type_ii_feedback(clause, doc);
                }
            }
            1
        };
        if parallel {
            self.clauses.par_iter_mut().enumerate().map(update).sum()
        } else {
            self.clauses.iter_mut().enumerate().map(update).sum()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::Literal;
    use crate::rng::substream;

    fn params(m: usize) -> HyperParams<f64> {
        HyperParams::new(m, 100, 3.9, 10)
    }

    fn forced(k: usize, fire: &[bool]) -> TsetlinMachine<f64> {
        // clause i fires on the all-ones doc iff fire[i]; otherwise it requires NOT x_0
        let clauses = fire
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                let mut states = vec![100u16; 2 * k];
                let lit = if f { Literal::plain(0) } else { Literal::negated(0) };
                states[lit.automaton_index()] = 150;
                Clause::from_states(k, 100, Polarity::for_ordinal(i), states).unwrap()
            })
            .collect();
        TsetlinMachine::from_clauses(k, params(fire.len()), clauses).unwrap()
    }

    #[test]
    fn hyperparameter_validation() {
        assert!(params(10).validate().is_ok());
        assert!(matches!(params(9).validate(), Err(Error::InvalidClauseCount(9))));
        assert!(matches!(params(0).validate(), Err(Error::InvalidClauseCount(0))));
        assert!(HyperParams::new(10, 100, 0.5f64, 10).validate().is_err());
        assert!(HyperParams::new(10, 100, f64::NAN, 10).validate().is_err());
        assert!(matches!(HyperParams::new(10, 100, 2.0f64, 0).validate(), Err(Error::ZeroThreshold)));
        assert!(HyperParams::new(10, 0, 2.0f64, 1).validate().is_err());
    }

    #[test]
    fn balanced_polarities() {
        let tm = TsetlinMachine::new(5, params(8), &mut substream(0, 0)).unwrap();
        let pos = tm.clauses().iter().filter(|c| c.polarity() == Polarity::Positive).count();
        assert_eq!(pos, 4);
        assert_eq!(tm.clauses()[0].polarity(), Polarity::Positive);
    }

    #[test]
    fn vote_sums() {
        let ones = BitDocument::from_bits(&[true; 3]);
        // (+:1, -:0, +:1, -:1)
        let tm = forced(3, &[true, false, true, true]);
        assert_eq!(tm.vote_sum(&ones, EvalMode::Inference).unwrap(), 1);
        assert!(tm.classify(&ones).unwrap());
        let tm = forced(3, &[false, false, false, false]);
        assert_eq!(tm.vote_sum(&ones, EvalMode::Inference).unwrap(), 0);
        assert!(!tm.classify(&ones).unwrap());
        let tm = forced(3, &[true, false, true, false]);
        assert_eq!(tm.vote_sum(&ones, EvalMode::Inference).unwrap(), 2);
        let tm = forced(3, &[false, true, false, true]);
        assert_eq!(tm.vote_sum(&ones, EvalMode::Inference).unwrap(), -2);
        assert!(!tm.classify(&ones).unwrap());
    }

    #[test]
    fn vote_sum_dimension_mismatch() {
        let tm = forced(3, &[true, false]);
        assert!(tm.vote_sum(&BitDocument::zeros(4), EvalMode::Inference).is_err());
        assert!(tm.classify(&BitDocument::zeros(2)).is_err());
    }

    #[test]
    fn saturated_positive_vote_is_a_noop() {
        // T=2, four positive clauses fire: f = 4 - 0 >= T
        let mut p = params(8);
        p.threshold = 2;
        let k = 3;
        let clauses = (0..8)
            .map(|i| {
                let mut states = vec![100u16; 2 * k];
                let lit = if i % 2 == 0 { Literal::plain(0) } else { Literal::negated(0) };
                states[lit.automaton_index()] = 150;
                Clause::from_states(k, 100, Polarity::for_ordinal(i), states).unwrap()
            })
            .collect();
        let mut tm = TsetlinMachine::from_clauses(k, p, clauses).unwrap();
        let before = tm.clone();
        let doc = BitDocument::from_bits(&[true, false, true]);
        let mut rng = substream(3, 3);
        for _ in 0..100 {
            assert_eq!(tm.train_example(&doc, true, &mut rng).unwrap(), 0);
        }
        assert_eq!(tm, before);
    }

    #[test]
    fn parallel_matches_serial() {
        let mut a = TsetlinMachine::new(40, params(20), &mut substream(9, 0)).unwrap();
        let mut b = a.clone();
        let mut ra = substream(9, 1);
        let mut rb = substream(9, 1);
        let mut data = substream(9, 2);
        for _ in 0..200 {
            let doc = BitDocument::from_bits(&(0..40).map(|_| data.gen_bool(0.3)).collect::<Vec<_>>());
            let y = data.gen_bool(0.5);
            let na = a.train_example(&doc, y, &mut ra).unwrap();
            let nb = b.train_example_parallel(&doc, y, &mut rb).unwrap();
            assert_eq!(na, nb);
        }
        assert_eq!(a, b);
    }
}
