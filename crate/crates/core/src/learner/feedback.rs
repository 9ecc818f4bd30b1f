//! Type I / Type II feedback and the threshold-controlled activation.

use rand::Rng;

use crate::automata::{Action, Feedback};
use crate::clause::{Clause, EvalMode};
use crate::document::{BitDocument, WORD_BITS};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeedbackKind {
    /// Combats false negatives; grows clauses toward patterns of the target.
    TypeI,
    /// Combats false positives; adds literals that falsify the clause.
    TypeII,
}

/// Probability that a clause is selected for feedback given vote sum `f`
/// and threshold `t`: `(T - clamp(f)) / 2T` for Type I, `(T + clamp(f)) / 2T`
/// for Type II.
pub fn feedback_activation_probability<F: Scalar>(f: i32, t: u32, kind: FeedbackKind) -> F {
    assert!(t >= 1, "threshold must be positive");
    let t = t as i64;
    let clamped = (f as i64).clamp(-t, t);
    let numerator = match kind {
        FeedbackKind::TypeI => t - clamped,
        FeedbackKind::TypeII => t + clamped,
    };
    F::from_i64(numerator).unwrap() / F::from_i64(2 * t).unwrap()
}

/// One Type I draw for a single automaton. `inv_s` is `1/s`.
///
/// # Panics
///
/// On (Include, clause=1, literal=0): an included false literal forces the
/// clause to 0, so this cell cannot occur.
#[inline]
pub fn type_i_draw<F: Scalar, R: Rng + ?Sized>(
    action: Action,
    clause: bool,
    literal: bool,
    inv_s: F,
    rng: &mut R,
) -> Feedback {
    let weak = F::unit_draw(rng) < inv_s;
    match (clause, literal, action) {
        (true, true, Action::Include) => {
            if weak {
                Feedback::Inaction
            } else {
                Feedback::Reward
            }
        }
        (true, true, Action::Exclude) => {
            if weak {
                Feedback::Inaction
            } else {
                Feedback::Penalty
            }
        }
        (true, false, Action::Include) => {
            unreachable!("included literal evaluates to 0 while its clause evaluates to 1")
        }
        (true, false, Action::Exclude) | (false, _, Action::Exclude) => {
            if weak {
                Feedback::Reward
            } else {
                Feedback::Inaction
            }
        }
        (false, _, Action::Include) => {
            if weak {
                Feedback::Penalty
            } else {
                Feedback::Inaction
            }
        }
    }
}

/// Type II is deterministic: only excluded false literals of a firing clause
/// are penalized.
#[inline]
pub fn type_ii_draw(action: Action, clause: bool, literal: bool) -> Feedback {
    if clause && !literal && action == Action::Exclude {
        Feedback::Penalty
    } else {
        Feedback::Inaction
    }
}

/// Applies Type I feedback to every automaton of `clause`.
pub fn type_i_feedback<F: Scalar, R: Rng + ?Sized>(
    clause: &mut Clause,
    doc: &BitDocument,
    specificity: F,
    rng: &mut R,
) {
    debug_assert_eq!(clause.n_features(), doc.len());
    let fired = clause.evaluate_unchecked(doc, EvalMode::Learning);
    let inv_s = F::one() / specificity;
    for feature in 0..clause.n_features() {
        let x = doc.get(feature);
        for (pos, literal) in [(2 * feature, x), (2 * feature + 1, !x)] {
            let fb = type_i_draw(clause.action(pos), fired, literal, inv_s, rng);
            clause.apply(pos, fb);
        }
    }
}

/// Applies Type II feedback. Returns the number of penalized automata.
pub fn type_ii_feedback(clause: &mut Clause, doc: &BitDocument) -> usize {
    debug_assert_eq!(clause.n_features(), doc.len());
    if !clause.evaluate_unchecked(doc, EvalMode::Learning) {
        return 0;
    }
    let k = clause.n_features();
    let mut targets = Vec::new();
    for (w, &xw) in doc.words().iter().enumerate() {
        let valid = if (w + 1) * WORD_BITS <= k { u64::MAX } else { (1u64 << (k % WORD_BITS)) - 1 };
        // plain literal false (x=0) and excluded
        let mut plain = !xw & !clause.plain_mask()[w] & valid;
        // negated literal false (x=1) and excluded
        let mut negated = xw & !clause.negated_mask()[w] & valid;
        while plain != 0 {
            let b = plain.trailing_zeros() as usize;
            plain &= plain - 1;
            targets.push(2 * (w * WORD_BITS + b));
        }
        while negated != 0 {
            let b = negated.trailing_zeros() as usize;
            negated &= negated - 1;
            targets.push(2 * (w * WORD_BITS + b) + 1);
        }
    }
    for &pos in &targets {
        debug_assert_eq!(clause.action(pos), Action::Exclude);
        clause.apply(pos, Feedback::Penalty);
    }
    targets.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::{Literal, Polarity};
    use crate::rng::substream;
    use rand::rngs::mock::StepRng;

    const N: u16 = 100;

    fn clause_with(k: usize, lits: &[(Literal, u16)]) -> Clause {
        let mut states = vec![N; 2 * k];
        for (l, s) in lits {
            states[l.automaton_index()] = *s;
        }
        Clause::from_states(k, N as usize, Polarity::Positive, states).unwrap()
    }

    #[test]
    fn activation_probabilities() {
        let p = |f, t, kind| feedback_activation_probability::<f64>(f, t, kind);
        assert_eq!(p(25, 25, FeedbackKind::TypeI), 0.0);
        assert_eq!(p(0, 20, FeedbackKind::TypeI), 0.5);
        assert_eq!(p(0, 20, FeedbackKind::TypeII), 0.5);
        assert_eq!(p(-25, 25, FeedbackKind::TypeI), 1.0);
        assert_eq!(p(100, 25, FeedbackKind::TypeI), 0.0);
        assert_eq!(p(-100, 25, FeedbackKind::TypeII), 0.0);
        assert_eq!(feedback_activation_probability::<f32>(5, 10, FeedbackKind::TypeII), 0.75);
    }

    #[test]
    fn type_i_cells_with_extreme_draws() {
        // StepRng(0) draws 0.0 (< 1/s), u64::MAX draws just below 1.0
        let lo = &mut StepRng::new(0, 0);
        let hi = &mut StepRng::new(u64::MAX, 0);
        let s = 1.0 / 8.0f64;
        use Action::*;
        assert_eq!(type_i_draw(Include, true, true, s, hi), Feedback::Reward);
        assert_eq!(type_i_draw(Include, true, true, s, lo), Feedback::Inaction);
        assert_eq!(type_i_draw(Exclude, true, true, s, hi), Feedback::Penalty);
        assert_eq!(type_i_draw(Exclude, true, true, s, lo), Feedback::Inaction);
        assert_eq!(type_i_draw(Exclude, true, false, s, lo), Feedback::Reward);
        assert_eq!(type_i_draw(Exclude, true, false, s, hi), Feedback::Inaction);
        assert_eq!(type_i_draw(Include, false, true, s, lo), Feedback::Penalty);
        assert_eq!(type_i_draw(Include, false, false, s, hi), Feedback::Inaction);
        assert_eq!(type_i_draw(Exclude, false, true, s, lo), Feedback::Reward);
        assert_eq!(type_i_draw(Exclude, false, false, s, hi), Feedback::Inaction);
    }

    #[test]
    #[should_panic(expected = "included literal")]
    fn type_i_unreachable_cell() {
        type_i_draw(Action::Include, true, false, 0.5f64, &mut StepRng::new(0, 0));
    }

    #[test]
    fn type_ii_cells() {
        use Action::*;
        assert_eq!(type_ii_draw(Exclude, true, false), Feedback::Penalty);
        assert_eq!(type_ii_draw(Include, true, true), Feedback::Inaction);
        assert_eq!(type_ii_draw(Exclude, true, true), Feedback::Inaction);
        for action in [Include, Exclude] {
            for lit in [true, false] {
                assert_eq!(type_ii_draw(action, false, lit), Feedback::Inaction);
            }
        }
    }

    #[test]
    fn type_ii_walkthrough_adds_negated_not() {
        // features: reacts=0, voltaren=1, not=2, to=3
        let mut c = clause_with(
            4,
            &[
                (Literal::plain(0), 2 * N - 1),
                (Literal::plain(1), N + 1),
                (Literal::negated(2), N),
                (Literal::plain(3), 1),
            ],
        );
        let doc = BitDocument::from_bits(&[true, true, true, false]);
        assert!(c.evaluate(&doc, EvalMode::Inference).unwrap());
        type_ii_feedback(&mut c, &doc);
        assert!(c.included_literals().contains(&Literal::negated(2)));
        assert!(!c.evaluate(&doc, EvalMode::Inference).unwrap());
        // plain "to" was at the deep exclude state; it only moves one step
        assert_eq!(c.states()[Literal::plain(3).automaton_index()], 2);
    }

    #[test]
    fn type_ii_skips_non_firing_clause() {
        let mut c = clause_with(3, &[(Literal::plain(0), N + 5)]);
        let before = c.clone();
        let doc = BitDocument::from_bits(&[false, true, true]);
        assert_eq!(type_ii_feedback(&mut c, &doc), 0);
        assert_eq!(c, before);
    }

    #[test]
    fn type_ii_matches_cellwise_table() {
        for seed in 0..50u64 {
            let mut rng = substream(seed, 0);
            let k = 1 + (seed as usize * 7) % 140;
            let states: Vec<u16> =
                (0..2 * k).map(|_| if rng.gen_bool(0.02) { N + 1 } else { rng.gen_range(1..=N) }).collect();
            let c0 = Clause::from_states(k, N as usize, Polarity::Positive, states).unwrap();
            let doc = BitDocument::from_bits(&(0..k).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
            let fired = c0.evaluate(&doc, EvalMode::Learning).unwrap();
            let mut expected = c0.clone();
            for pos in 0..2 * k {
                let lit = doc.get(pos / 2) != (pos % 2 == 1);
                expected.apply(pos, type_ii_draw(c0.action(pos), fired, lit));
            }
            let mut actual = c0.clone();
            type_ii_feedback(&mut actual, &doc);
            assert_eq!(actual, expected, "seed {seed}");
        }
    }

    #[test]
    fn type_i_grows_literals_present_in_document() {
        // all near center; with large s, literals that are true on the doc get pushed in
        let k = 6;
        let mut c = Clause::from_states(k, N as usize, Polarity::Positive, vec![N; 2 * k]).unwrap();
        let doc = BitDocument::from_bits(&[true, false, true, false, false, true]);
        let mut rng = substream(1, 1);
        for _ in 0..20 {
            type_i_feedback(&mut c, &doc, 1000.0f64, &mut rng);
        }
        assert!(c.evaluate(&doc, EvalMode::Inference).unwrap());
        for l in c.included_literals() {
            assert!(l.value(&doc));
        }
        assert!(c.len() >= k);
    }
}
