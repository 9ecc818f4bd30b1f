//! Two-action Tsetlin Automaton.
//!
//! States run from `1` to `2N`. States `1..=N` select [`Action::Exclude`],
//! states `N+1..=2N` select [`Action::Include`]. A reward moves the state one
//! step deeper into the current action's half (saturating at `1` and `2N`);
//! a penalty moves it one step toward the center, flipping the action when it
//! crosses between `N` and `N+1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `N` for which `2N` fits a `u16` state cell.
pub const MAX_STATES_PER_ACTION: usize = (u16::MAX / 2) as usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Exclude,
    Include,
}

/// Environment response fed to an automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feedback {
    Reward,
    Inaction,
    Penalty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TsetlinAutomaton {
    state: u16,
    states_per_action: u16,
}

pub(crate) fn check_states_per_action(n: usize) -> Result<u16> {
    if n == 0 {
        return Err(Error::ZeroStates);
    }
    if n > MAX_STATES_PER_ACTION {
        return Err(Error::TooManyStates(n));
    }
    Ok(n as u16)
}

/// Center initialization: uniform over `{N, N+1}`.
#[inline]
pub(crate) fn initial_state<R: Rng + ?Sized>(n: u16, rng: &mut R) -> u16 {
    if rng.gen::<bool>() {
        n + 1
    } else {
        n
    }
}

#[inline]
pub(crate) fn action_of(state: u16, n: u16) -> Action {
    if state <= n {
        Action::Exclude
    } else {
        Action::Include
    }
}

#[inline]
pub(crate) fn rewarded(state: u16, n: u16) -> u16 {
    if state <= n {
        if state > 1 {
            state - 1
        } else {
            state
        }
    } else if state < 2 * n {
        state + 1
    } else {
        state
    }
}

#[inline]
pub(crate) fn penalized(state: u16, n: u16) -> u16 {
    if state <= n {
        state + 1
    } else {
        state - 1
    }
}

impl TsetlinAutomaton {
    /// Fresh automaton at one of the two center states.
    pub fn new<R: Rng + ?Sized>(states_per_action: usize, rng: &mut R) -> Result<Self> {
        let n = check_states_per_action(states_per_action)?;
        Ok(Self { state: initial_state(n, rng), states_per_action: n })
    }

    pub fn with_state(states_per_action: usize, state: usize) -> Result<Self> {
        let n = check_states_per_action(states_per_action)?;
        if state == 0 || state > 2 * n as usize {
            return Err(Error::Malformed(format!(
                "state {state} outside [1, {}]",
                2 * n as usize
            )));
        }
        Ok(Self { state: state as u16, states_per_action: n })
    }

    #[inline]
    pub fn state(&self) -> usize {
        self.state as usize
    }

    #[inline]
    pub fn states_per_action(&self) -> usize {
        self.states_per_action as usize
    }

    #[inline]
    pub fn action(&self) -> Action {
        action_of(self.state, self.states_per_action)
    }

    #[inline]
    pub fn reward(&mut self) {
        self.state = rewarded(self.state, self.states_per_action);
    }

    #[inline]
    pub fn penalize(&mut self) {
        self.state = penalized(self.state, self.states_per_action);
    }

    /// Applies one feedback signal. Inaction leaves the state untouched.
    #[inline]
    pub fn apply(&mut self, feedback: Feedback) {
        match feedback {
            Feedback::Reward => self.reward(),
            Feedback::Penalty => self.penalize(),
            Feedback::Inaction => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::mock::StepRng;

    fn at(state: usize) -> TsetlinAutomaton {
        TsetlinAutomaton::with_state(100, state).unwrap()
    }

    #[test]
    fn center_initialization() {
        let low = TsetlinAutomaton::new(100, &mut StepRng::new(0, 0)).unwrap();
        assert_eq!(low.state(), 100);
        assert_eq!(low.action(), Action::Exclude);

        let high = TsetlinAutomaton::new(100, &mut StepRng::new(u64::MAX, 0)).unwrap();
        assert_eq!(high.state(), 101);
        assert_eq!(high.action(), Action::Include);

        let mut rng = StepRng::new(0, 1 << 63);
        for _ in 0..4 {
            let a = TsetlinAutomaton::new(1, &mut rng).unwrap();
            assert!(a.state() == 1 || a.state() == 2);
        }
    }

    #[test]
    fn rejects_zero_and_oversized() {
        let mut rng = StepRng::new(0, 0);
        assert!(matches!(TsetlinAutomaton::new(0, &mut rng), Err(Error::ZeroStates)));
        assert!(matches!(
            TsetlinAutomaton::new(MAX_STATES_PER_ACTION + 1, &mut rng),
            Err(Error::TooManyStates(_))
        ));
        assert!(TsetlinAutomaton::with_state(100, 0).is_err());
        assert!(TsetlinAutomaton::with_state(100, 201).is_err());
    }

    #[test]
    fn action_boundaries() {
        assert_eq!(at(100).action(), Action::Exclude);
        assert_eq!(at(101).action(), Action::Include);
        assert_eq!(at(1).action(), Action::Exclude);
        assert_eq!(at(200).action(), Action::Include);
    }

    #[test]
    fn reward_moves_away_from_center() {
        let mut a = at(150);
        a.reward();
        assert_eq!(a.state(), 151);
        let mut a = at(50);
        a.reward();
        assert_eq!(a.state(), 49);
        let mut a = at(1);
        a.reward();
        assert_eq!(a.state(), 1);
        let mut a = at(200);
        a.reward();
        assert_eq!(a.state(), 200);
    }

    #[test]
    fn penalty_moves_toward_center() {
        let mut a = at(100);
        a.penalize();
        assert_eq!(a.state(), 101);
        assert_eq!(a.action(), Action::Include);
        let mut a = at(101);
        a.penalize();
        assert_eq!(a.state(), 100);
        let mut a = at(50);
        a.penalize();
        assert_eq!(a.state(), 51);
    }

    #[test]
    fn inaction_is_identity() {
        let mut a = at(77);
        a.apply(Feedback::Inaction);
        assert_eq!(a, at(77));
    }

    #[test]
    fn n_penalties_from_deepest_exclude_reach_include() {
        for n in [1usize, 2, 5, 100, 500] {
            let mut a = TsetlinAutomaton::with_state(n, 1).unwrap();
            for _ in 0..n {
                a.penalize();
            }
            assert_eq!(a.action(), Action::Include, "N={n}");
        }
    }

    proptest! {
        #[test]
        fn stays_in_bounds(n in 1usize..300, seq in proptest::collection::vec(0u8..3, 0..2000)) {
            let mut a = TsetlinAutomaton::with_state(n, n).unwrap();
            for op in seq {
                a.apply(match op { 0 => Feedback::Reward, 1 => Feedback::Penalty, _ => Feedback::Inaction });
                prop_assert!(a.state() >= 1 && a.state() <= 2 * n);
                prop_assert_eq!(a.action() == Action::Include, a.state() > n);
            }
        }

        #[test]
        fn reward_and_penalty_cancel_off_boundary(n in 2usize..300, frac in 0.0f64..1.0) {
            // non-boundary: 1 < state < 2N
            let state = 2 + ((2 * n - 3) as f64 * frac) as usize;
            prop_assume!(state > 1 && state < 2 * n);
            let mut a = TsetlinAutomaton::with_state(n, state).unwrap();
            a.reward();
            a.penalize();
            prop_assert_eq!(a.state(), state);
            // penalty first, then reward: only cancels when the penalty kept the action
            let mut b = TsetlinAutomaton::with_state(n, state).unwrap();
            let before = b.action();
            b.penalize();
            if b.action() == before {
                b.reward();
                prop_assert_eq!(b.state(), state);
            }
        }
    }
}
