//! Finite state spaces and the bitset lattice all fixed points live in.
//!
//! A [`StateSpace`] enumerates every assignment of in-domain values to the
//! declared variables, in row-major order over the declaration list (the
//! first declared variable varies slowest). [`StateSet`] is a dense
//! bit-vector over that enumeration and forms a complete lattice under
//! union, intersection and complement.

use crate::syntax::{BinOp, Domain, Expr, VarDecl};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpaceError {
    #[error("state space has {size} states, exceeding the configured bound of {max}")]
    TooManyStates { size: u128, max: u64 },
    #[error("duplicate variable declaration `{0}`")]
    DuplicateVar(String),
}

/// One concrete state: a value for each declared variable, in declaration
/// order. Booleans are stored as 0/1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State(pub Vec<i64>);

impl State {
    pub fn get(&self, var: usize) -> i64 {
        self.0[var]
    }

    pub fn set(&mut self, var: usize, value: i64) {
        self.0[var] = value;
    }
}

/// Enumerated state space for a declaration list.
#[derive(Debug, Clone)]
pub struct StateSpace {
    decls: Vec<VarDecl>,
    sizes: Vec<u64>,
    strides: Vec<u64>,
    size: usize,
}

impl StateSpace {
    /// Enumerate the space. Fails if the total state count exceeds `max`.
    pub fn enumerate(decls: &[VarDecl], max: u64) -> Result<StateSpace, SpaceError> {
        for (i, d) in decls.iter().enumerate() {
            if decls[..i].iter().any(|other| other.name == d.name) {
                return Err(SpaceError::DuplicateVar(d.name.clone()));
            }
        }
        let mut total: u128 = 1;
        let sizes: Vec<u64> = decls.iter().map(|d| d.domain.size()).collect();
        for &s in &sizes {
            total *= s as u128;
            if total > max as u128 {
                return Err(SpaceError::TooManyStates { size: total, max });
            }
        }
        let mut strides = vec![1u64; decls.len()];
        for i in (0..decls.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        Ok(StateSpace {
            decls: decls.to_vec(),
            sizes,
            strides,
            size: total as usize,
        })
    }

    pub fn decls(&self) -> &[VarDecl] {
        &self.decls
    }

    /// Total number of states (1 for an empty declaration list).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.decls.iter().position(|d| d.name == name)
    }

    pub fn domain(&self, var: usize) -> Domain {
        self.decls[var].domain
    }

    /// Dense index of a state; inverse of [`state_at`](Self::state_at).
    pub fn index_of(&self, state: &State) -> usize {
        debug_assert_eq!(state.0.len(), self.decls.len());
        let mut idx = 0u64;
        for (i, &v) in state.0.iter().enumerate() {
            let off = (v - self.decls[i].domain.lo()) as u64;
            debug_assert!(off < self.sizes[i], "value {v} outside domain of {}", self.decls[i].name);
            idx += off * self.strides[i];
        }
        idx as usize
    }

    pub fn state_at(&self, idx: usize) -> State {
        let mut state = State(vec![0; self.decls.len()]);
        self.state_at_into(idx, &mut state);
        state
    }

    /// In-place variant of [`state_at`](Self::state_at) for hot loops.
    pub fn state_at_into(&self, idx: usize, state: &mut State) {
        debug_assert!(idx < self.size);
        state.0.resize(self.decls.len(), 0);
        let mut rest = idx as u64;
        for i in 0..self.decls.len() {
            let off = rest / self.strides[i];
            rest %= self.strides[i];
            state.0[i] = self.decls[i].domain.lo() + off as i64;
        }
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.size).map(|i| self.state_at(i))
    }

    /// Wrap a raw value into a variable's domain: `lo + ((v - lo) mod n)`.
    pub fn wrap(&self, var: usize, value: i128) -> i64 {
        let lo = self.decls[var].domain.lo() as i128;
        let n = self.sizes[var] as i128;
        (lo + (value - lo).rem_euclid(n)) as i64
    }

    /// Evaluate an expression at a state. Arithmetic is over unbounded
    /// integers; nothing is wrapped here (wrapping happens at assignment).
    pub fn eval_expr(&self, expr: &Expr, state: &State) -> i128 {
        eval_expr_env(expr, &mut |name| {
            let idx = self
                .var_index(name)
                .unwrap_or_else(|| panic!("undeclared variable `{name}` in expression"));
            state.get(idx)
        })
    }

    /// Render a state as `{x = 1, y = 11}` with booleans shown symbolically.
    pub fn describe(&self, state: &State) -> String {
        let parts: Vec<String> = self
            .decls
            .iter()
            .zip(&state.0)
            .map(|(d, &v)| match d.domain {
                Domain::Bool => format!("{} = {}", d.name, v != 0),
                Domain::Int { .. } => format!("{} = {}", d.name, v),
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Evaluate an expression with an arbitrary variable lookup. Used both for
/// plain states and for states extended with quantifier bindings.
pub fn eval_expr_env(expr: &Expr, lookup: &mut impl FnMut(&str) -> i64) -> i128 {
    match expr {
        Expr::Const(n) => *n as i128,
        Expr::Var(name) => lookup(name) as i128,
        Expr::Bin(op, lhs, rhs) => {
            let l = eval_expr_env(lhs, lookup);
            let r = eval_expr_env(rhs, lookup);
            match op {
                BinOp::Add => l.wrapping_add(r),
                BinOp::Sub => l.wrapping_sub(r),
                BinOp::Mul => l.wrapping_mul(r),
                // Euclidean remainder, total: `a % 0` is `a`.
                BinOp::Mod => {
                    if r == 0 {
                        l
                    } else {
                        l.rem_euclid(r.wrapping_abs())
                    }
                }
            }
        }
    }
}

/// Conservative interval of an expression's value over a space, used to
/// decide whether an assignment can leave the target domain.
pub fn expr_interval(expr: &Expr, space: &StateSpace) -> Option<(i128, i128)> {
    match expr {
        Expr::Const(n) => Some((*n as i128, *n as i128)),
        Expr::Var(name) => {
            let idx = space.var_index(name)?;
            let d = space.domain(idx);
            Some((d.lo() as i128, d.hi() as i128))
        }
        Expr::Bin(op, lhs, rhs) => {
            let (llo, lhi) = expr_interval(lhs, space)?;
            let (rlo, rhi) = expr_interval(rhs, space)?;
            match op {
                BinOp::Add => Some((llo + rlo, lhi + rhi)),
                BinOp::Sub => Some((llo - rhi, lhi - rlo)),
                BinOp::Mul => {
                    let corners = [llo * rlo, llo * rhi, lhi * rlo, lhi * rhi];
                    Some((
                        *corners.iter().min().unwrap(),
                        *corners.iter().max().unwrap(),
                    ))
                }
                BinOp::Mod => {
                    if rlo == rhi && rlo != 0 {
                        Some((0, rlo.abs() - 1))
                    } else {
                        // Divisor not a nonzero constant: fall back to the
                        // widest result the Euclidean semantics allows.
                        let bound = rhi.abs().max(rlo.abs()).max(1) - 1;
                        Some((llo.min(0), lhi.max(bound)))
                    }
                }
            }
        }
    }
}

const WORD_BITS: usize = 64;

/// Dense subset of a state space, as a fixed-width bit vector.
#[derive(Clone, PartialEq, Eq)]
pub struct StateSet {
    universe: usize,
    words: Vec<u64>,
}

impl StateSet {
    pub fn empty(universe: usize) -> StateSet {
        StateSet {
            universe,
            words: vec![0; universe.div_ceil(WORD_BITS)],
        }
    }

    pub fn full(universe: usize) -> StateSet {
        let mut set = StateSet::empty(universe);
        for w in &mut set.words {
            *w = u64::MAX;
        }
        set.mask_tail();
        set
    }

    fn mask_tail(&mut self) {
        let tail = self.universe % WORD_BITS;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.universe
    }

    pub fn contains(&self, idx: usize) -> bool {
        debug_assert!(idx < self.universe);
        self.words[idx / WORD_BITS] & (1 << (idx % WORD_BITS)) != 0
    }

    pub fn insert(&mut self, idx: usize) {
        debug_assert!(idx < self.universe);
        self.words[idx / WORD_BITS] |= 1 << (idx % WORD_BITS);
    }

    pub fn remove(&mut self, idx: usize) {
        debug_assert!(idx < self.universe);
        self.words[idx / WORD_BITS] &= !(1 << (idx % WORD_BITS));
    }

    fn check_same(&self, other: &StateSet) {
        assert_eq!(
            self.universe, other.universe,
            "state sets over mismatched spaces"
        );
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.check_same(other);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        StateSet { universe: self.universe, words }
    }

    pub fn intersect(&self, other: &StateSet) -> StateSet {
        self.check_same(other);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        StateSet { universe: self.universe, words }
    }

    pub fn minus(&self, other: &StateSet) -> StateSet {
        self.check_same(other);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & !b)
            .collect();
        StateSet { universe: self.universe, words }
    }

    pub fn complement(&self) -> StateSet {
        let mut set = StateSet {
            universe: self.universe,
            words: self.words.iter().map(|w| !w).collect(),
        };
        set.mask_tail();
        set
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.check_same(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Lowest set index, used for deterministic witness extraction.
    pub fn first(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = i * WORD_BITS;
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let bit = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(base + bit)
                }
            })
        })
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateSet({}/{} {{", self.count(), self.universe)?;
        for (n, idx) in self.iter_ones().take(16).enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{idx}")?;
        }
        if self.count() > 16 {
            write!(f, ", ...")?;
        }
        write!(f, "}})")
    }
}
