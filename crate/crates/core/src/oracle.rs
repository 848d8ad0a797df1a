//! Brute-force ground truth: small-step execution of programs with exact
//! cycle detection, and the four transformers derived directly from the
//! resulting initial-state/final-state relation.
//!
//! A configuration is a stack of pending statements plus a state. The
//! statement stack only ever holds subterms of the (fixed) program, so two
//! configurations are equal exactly when their stacks hold the same
//! subterm occurrences and their states agree; a revisited configuration
//! therefore proves divergence, and every diverging run revisits one
//! because the configuration space is finite.

use crate::eval::eval_formula;
use crate::statespace::{State, StateSet, StateSpace};
use crate::syntax::Stmt;
use std::collections::HashSet;

/// Result of running a program from one initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Final(State),
    Diverges,
}

/// The total map from initial states to outcomes, with final states stored
/// as dense indices (`None` marks divergence).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeMap {
    finals: Vec<Option<usize>>,
}

impl OutcomeMap {
    /// Final-state index for an initial state, or `None` on divergence.
    pub fn get(&self, initial: usize) -> Option<usize> {
        self.finals[initial]
    }

    pub fn len(&self) -> usize {
        self.finals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.finals.is_empty()
    }

    pub fn from_finals(finals: Vec<Option<usize>>) -> OutcomeMap {
        OutcomeMap { finals }
    }
}

/// Execute a desugared program from one state by small steps.
pub fn run(program: &Stmt, initial: &State, space: &StateSpace) -> Outcome {
    debug_assert!(!program.contains_skip(), "programs must be desugared before execution");
    let mut continuation: Vec<&Stmt> = vec![program];
    let mut state = initial.clone();
    // Keyed by loop-head configurations only: every cycle passes through a
    // `while`, so checking there is enough.
    let mut seen: HashSet<(Vec<usize>, usize)> = HashSet::new();

    while let Some(&top) = continuation.last() {
        match top {
            Stmt::Diverge => return Outcome::Diverges,
            Stmt::Skip => unreachable!("skip survived desugaring"),
            Stmt::Assign(var, expr) => {
                continuation.pop();
                let vi = space
                    .var_index(var)
                    .unwrap_or_else(|| panic!("undeclared variable `{var}`"));
                let value = space.eval_expr(expr, &state);
                state.set(vi, space.wrap(vi, value));
            }
            Stmt::Seq(first, second) => {
                continuation.pop();
                continuation.push(second);
                continuation.push(first);
            }
            Stmt::Ite(guard, then_branch, else_branch) => {
                continuation.pop();
                if eval_formula(guard, space, &state) {
                    continuation.push(then_branch);
                } else {
                    continuation.push(else_branch);
                }
            }
            Stmt::While(guard, body) => {
                let key = (
                    continuation
                        .iter()
                        .map(|s| *s as *const Stmt as usize)
                        .collect::<Vec<_>>(),
                    space.index_of(&state),
                );
                if !seen.insert(key) {
                    return Outcome::Diverges;
                }
                if eval_formula(guard, space, &state) {
                    continuation.push(body);
                } else {
                    continuation.pop();
                }
            }
        }
    }
    Outcome::Final(state)
}

/// Tabulate [`run`] over every state of the space.
pub fn relation(program: &Stmt, space: &StateSpace) -> OutcomeMap {
    let finals = (0..space.size())
        .map(|idx| match run(program, &space.state_at(idx), space) {
            Outcome::Final(final_state) => Some(space.index_of(&final_state)),
            Outcome::Diverges => None,
        })
        .collect();
    OutcomeMap { finals }
}

/// States from which execution certainly terminates in `post`.
pub fn ref_wp(map: &OutcomeMap, post: &StateSet) -> StateSet {
    assert_eq!(map.len(), post.universe(), "outcome map over mismatched space");
    let mut set = StateSet::empty(map.len());
    for initial in 0..map.len() {
        if let Some(final_idx) = map.get(initial) {
            if post.contains(final_idx) {
                set.insert(initial);
            }
        }
    }
    set
}

/// States from which execution diverges or terminates in `post`.
pub fn ref_wlp(map: &OutcomeMap, post: &StateSet) -> StateSet {
    assert_eq!(map.len(), post.universe(), "outcome map over mismatched space");
    let mut set = StateSet::empty(map.len());
    for initial in 0..map.len() {
        match map.get(initial) {
            None => set.insert(initial),
            Some(final_idx) if post.contains(final_idx) => set.insert(initial),
            Some(_) => {}
        }
    }
    set
}

/// Final states reachable from `pre`.
pub fn ref_sp(map: &OutcomeMap, pre: &StateSet) -> StateSet {
    assert_eq!(map.len(), pre.universe(), "outcome map over mismatched space");
    let mut set = StateSet::empty(map.len());
    for initial in pre.iter_ones() {
        if let Some(final_idx) = map.get(initial) {
            set.insert(final_idx);
        }
    }
    set
}

/// Final states reachable only from `pre`, plus the unreachable states
/// (vacuously).
pub fn ref_slp(map: &OutcomeMap, pre: &StateSet) -> StateSet {
    assert_eq!(map.len(), pre.universe(), "outcome map over mismatched space");
    let mut set = StateSet::full(map.len());
    for initial in 0..map.len() {
        if !pre.contains(initial) {
            if let Some(final_idx) = map.get(initial) {
                set.remove(final_idx);
            }
        }
    }
    set
}
