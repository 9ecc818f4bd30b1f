//! Conjunctive clauses over term-presence literals.
//!
//! A clause over `k` features owns `2k` automata: position `2j` decides
//! whether the plain literal `x_j` is included, position `2j + 1` decides
//! `NOT x_j`. Include masks mirror the automaton actions bit-for-bit so that
//! evaluation is a word-wise AND with early exit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::automata::{self, Action, Feedback, TsetlinAutomaton};
use crate::document::{words_for, BitDocument, WORD_BITS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub feature: usize,
    pub negated: bool,
}

impl Literal {
    pub fn plain(feature: usize) -> Self {
        Self { feature, negated: false }
    }

    pub fn negated(feature: usize) -> Self {
        Self { feature, negated: true }
    }

    /// Truth value of this literal on a document.
    #[inline]
    pub fn value(&self, doc: &BitDocument) -> bool {
        doc.get(self.feature) != self.negated
    }

    /// Automaton position controlling this literal.
    #[inline]
    pub fn automaton_index(&self) -> usize {
        2 * self.feature + self.negated as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    /// Polarity of the clause at 0-based `ordinal` in a pool. Ordinal 0 is
    /// the first (odd, 1-based) clause and votes for the class.
    pub fn for_ordinal(ordinal: usize) -> Self {
        if ordinal.is_multiple_of(2) {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }

    #[inline]
    pub fn sign(self) -> i32 {
        match self {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
        }
    }
}

/// Empty clauses output 1 while learning (so Type I feedback can grow them)
/// and 0 at inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalMode {
    Learning,
    Inference,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    polarity: Polarity,
    n_features: usize,
    states_per_action: u16,
    states: Vec<u16>,
    include_plain: Vec<u64>,
    include_negated: Vec<u64>,
    included: usize,
}

impl Clause {
    pub fn new<R: Rng + ?Sized>(
        n_features: usize,
        states_per_action: usize,
        polarity: Polarity,
        rng: &mut R,
    ) -> Result<Self> {
        let n = automata::check_states_per_action(states_per_action)?;
        let states = (0..2 * n_features).map(|_| automata::initial_state(n, rng)).collect();
        Ok(Self::from_raw(n_features, n, polarity, states))
    }

    /// Rebuilds a clause from stored automaton states.
    pub fn from_states(
        n_features: usize,
        states_per_action: usize,
        polarity: Polarity,
        states: Vec<u16>,
    ) -> Result<Self> {
        let n = automata::check_states_per_action(states_per_action)?;
        if states.len() != 2 * n_features {
            return Err(Error::DimensionMismatch { expected: 2 * n_features, found: states.len() });
        }
        if let Some(bad) = states.iter().find(|&&s| s == 0 || s > 2 * n) {
            return Err(Error::Malformed(format!("automaton state {bad} outside [1, {}]", 2 * n)));
        }
        Ok(Self::from_raw(n_features, n, polarity, states))
    }

    fn from_raw(n_features: usize, n: u16, polarity: Polarity, states: Vec<u16>) -> Self {
        let words = words_for(n_features);
        let mut clause = Self {
            polarity,
            n_features,
            states_per_action: n,
            states,
            include_plain: vec![0; words],
            include_negated: vec![0; words],
            included: 0,
        };
        clause.rebuild_masks();
        clause
    }

    fn rebuild_masks(&mut self) {
        self.include_plain.iter_mut().for_each(|w| *w = 0);
        self.include_negated.iter_mut().for_each(|w| *w = 0);
        self.included = 0;
        for pos in 0..self.states.len() {
            if self.states[pos] > self.states_per_action {
                self.set_mask(pos, true);
            }
        }
    }

    #[inline]
    fn set_mask(&mut self, pos: usize, on: bool) {
        let feature = pos / 2;
        let masks = if pos.is_multiple_of(2) { &mut self.include_plain } else { &mut self.include_negated };
        let bit = 1u64 << (feature % WORD_BITS);
        if on {
            masks[feature / WORD_BITS] |= bit;
            self.included += 1;
        } else {
            masks[feature / WORD_BITS] &= !bit;
            self.included -= 1;
        }
    }

    #[inline]
    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    #[inline]
    pub fn states_per_action(&self) -> usize {
        self.states_per_action as usize
    }

    /// Raw automaton states, two per feature.
    #[inline]
    pub fn states(&self) -> &[u16] {
        &self.states
    }

    pub fn automaton(&self, pos: usize) -> TsetlinAutomaton {
        TsetlinAutomaton::with_state(self.states_per_action as usize, self.states[pos] as usize)
            .expect("clause states are kept in range")
    }

    #[inline]
    pub fn action(&self, pos: usize) -> Action {
        automata::action_of(self.states[pos], self.states_per_action)
    }

    /// Number of included literals.
    #[inline]
    pub fn len(&self) -> usize {
        self.included
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.included == 0
    }

    /// Included literals in ascending feature order, plain before negated.
    pub fn included_literals(&self) -> Vec<Literal> {
        (0..self.states.len())
            .filter(|&pos| self.action(pos) == Action::Include)
            .map(|pos| Literal { feature: pos / 2, negated: pos % 2 == 1 })
            .collect()
    }

    pub fn evaluate(&self, doc: &BitDocument, mode: EvalMode) -> Result<bool> {
        if doc.len() != self.n_features {
            return Err(Error::DimensionMismatch { expected: self.n_features, found: doc.len() });
        }
        Ok(self.evaluate_unchecked(doc, mode))
    }

    /// Evaluation without the dimension check; callers guarantee `doc` has
    /// `n_features` bits.
    #[inline]
    pub(crate) fn evaluate_unchecked(&self, doc: &BitDocument, mode: EvalMode) -> bool {
        if self.included == 0 {
            return mode == EvalMode::Learning;
        }
        let x = doc.words();
        for ((&plain, &neg), &xw) in self.include_plain.iter().zip(&self.include_negated).zip(x) {
            if (plain & !xw) | (neg & xw) != 0 {
                return false;
            }
        }
        true
    }

    /// Applies feedback to one automaton, keeping masks in sync.
    #[inline]
    pub(crate) fn apply(&mut self, pos: usize, feedback: Feedback) {
        let n = self.states_per_action;
        let old = self.states[pos];
        let new = match feedback {
            Feedback::Reward => automata::rewarded(old, n),
            Feedback::Penalty => automata::penalized(old, n),
            Feedback::Inaction => return,
        };
        self.states[pos] = new;
        let was = old > n;
        let is = new > n;
        if was != is {
            self.set_mask(pos, is);
        }
    }

    /// Words of the plain include mask.
    #[inline]
    pub(crate) fn plain_mask(&self) -> &[u64] {
        &self.include_plain
    }

    #[inline]
    pub(crate) fn negated_mask(&self) -> &[u64] {
        &self.include_negated
    }

    #[cfg(test)]
    pub(crate) fn set_state(&mut self, pos: usize, state: u16) {
        self.states[pos] = state;
        self.rebuild_masks();
    }
}
