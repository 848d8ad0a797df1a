//! Compositional semantic engine: wp, wlp, sp and slp as state-set
//! transformers, with Kleene iteration to least/greatest fixed points for
//! loops.
//!
//! `slp` is computed primarily as the De Morgan dual of `sp`;
//! [`Engine::slp_direct`] keeps the structural liberal recursion as an
//! independent second route, and the two must always agree.

use crate::eval::{formula_of_set, states_of};
use crate::statespace::{State, StateSet, StateSpace};
use crate::syntax::{Formula, Stmt, TransformerKind};

/// Whether a loop fixpoint was iterated from the bottom or the top.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixpointPolarity {
    Least,
    Greatest,
}

/// Record of one Kleene iteration on a loop.
#[derive(Debug, Clone)]
pub struct FixpointTrace {
    pub transformer: TransformerKind,
    pub polarity: FixpointPolarity,
    pub loop_label: String,
    pub iterations: usize,
    pub sizes: Vec<usize>,
    pub converged: bool,
}

/// Semantic transformer engine over one state space. Queries are pure;
/// the engine only accumulates fixpoint traces.
pub struct Engine<'a> {
    space: &'a StateSpace,
    traces: Vec<FixpointTrace>,
    active: TransformerKind,
}

impl<'a> Engine<'a> {
    pub fn new(space: &'a StateSpace) -> Engine<'a> {
        Engine {
            space,
            traces: Vec::new(),
            active: TransformerKind::Wp,
        }
    }

    pub fn space(&self) -> &'a StateSpace {
        self.space
    }

    pub fn traces(&self) -> &[FixpointTrace] {
        &self.traces
    }

    pub fn take_traces(&mut self) -> Vec<FixpointTrace> {
        std::mem::take(&mut self.traces)
    }

    /// States from which the program always terminates in `post`.
    pub fn wp(&mut self, program: &Stmt, post: &StateSet) -> StateSet {
        self.active = TransformerKind::Wp;
        self.backward(program, post, false)
    }

    /// States from which the program diverges or terminates in `post`.
    pub fn wlp(&mut self, program: &Stmt, post: &StateSet) -> StateSet {
        self.active = TransformerKind::Wlp;
        self.backward(program, post, true)
    }

    /// Final states reachable from `pre`.
    pub fn sp(&mut self, program: &Stmt, pre: &StateSet) -> StateSet {
        self.active = TransformerKind::Sp;
        self.forward_sp(program, pre)
    }

    /// Final states reachable only from `pre` (unreachable states included
    /// vacuously). Computed as the dual of `sp`.
    pub fn slp(&mut self, program: &Stmt, pre: &StateSet) -> StateSet {
        self.active = TransformerKind::Slp;
        self.forward_sp(program, &pre.complement()).complement()
    }

    /// Second route for `slp`: the structural liberal recursion, with the
    /// loop case iterated as a greatest fixed point from the full space.
    pub fn slp_direct(&mut self, program: &Stmt, pre: &StateSet) -> StateSet {
        self.active = TransformerKind::Slp;
        self.forward_slp(program, pre)
    }

    /// One query for whichever transformer is named.
    pub fn apply(&mut self, kind: TransformerKind, program: &Stmt, arg: &StateSet) -> StateSet {
        match kind {
            TransformerKind::Wp => self.wp(program, arg),
            TransformerKind::Wlp => self.wlp(program, arg),
            TransformerKind::Sp => self.sp(program, arg),
            TransformerKind::Slp => self.slp(program, arg),
        }
    }

    fn guard_set(&self, guard: &Formula) -> StateSet {
        states_of(guard, self.space)
    }

    /// Predecessors of `post` under one assignment.
    fn assign_backward(&self, var: &str, expr: &crate::syntax::Expr, post: &StateSet) -> StateSet {
        let vi = self
            .space
            .var_index(var)
            .unwrap_or_else(|| panic!("undeclared variable `{var}`"));
        let mut result = StateSet::empty(self.space.size());
        let mut state = State(Vec::new());
        for idx in 0..self.space.size() {
            self.space.state_at_into(idx, &mut state);
            let value = self.space.eval_expr(expr, &state);
            let saved = state.get(vi);
            state.set(vi, self.space.wrap(vi, value));
            let succ = self.space.index_of(&state);
            state.set(vi, saved);
            if post.contains(succ) {
                result.insert(idx);
            }
        }
        result
    }

    /// Image of `pre` under one assignment.
    fn assign_forward(&self, var: &str, expr: &crate::syntax::Expr, pre: &StateSet) -> StateSet {
        assign_image(self.space, var, expr, pre)
    }

    fn backward(&mut self, program: &Stmt, post: &StateSet, liberal: bool) -> StateSet {
        match program {
            Stmt::Diverge => {
                if liberal {
                    StateSet::full(self.space.size())
                } else {
                    StateSet::empty(self.space.size())
                }
            }
            Stmt::Skip => panic!("skip must be desugared before analysis"),
            Stmt::Assign(var, expr) => self.assign_backward(var, expr, post),
            Stmt::Seq(first, second) => {
                let mid = self.backward(second, post, liberal);
                self.backward(first, &mid, liberal)
            }
            Stmt::Ite(guard, then_branch, else_branch) => {
                let guard_set = self.guard_set(guard);
                let then_pre = self.backward(then_branch, post, liberal);
                let else_pre = self.backward(else_branch, post, liberal);
                guard_set
                    .intersect(&then_pre)
                    .union(&guard_set.complement().intersect(&else_pre))
            }
            Stmt::While(guard, body) => {
                let guard_set = self.guard_set(guard);
                let exit = guard_set.complement().intersect(post);
                let label = format!("while ({guard})");
                let polarity = if liberal {
                    FixpointPolarity::Greatest
                } else {
                    FixpointPolarity::Least
                };
                self.kleene(polarity, label, |engine, x| {
                    exit.union(&guard_set.intersect(&engine.backward(body, x, liberal)))
                })
            }
        }
    }

    fn forward_sp(&mut self, program: &Stmt, pre: &StateSet) -> StateSet {
        match program {
            Stmt::Diverge => StateSet::empty(self.space.size()),
            Stmt::Skip => panic!("skip must be desugared before analysis"),
            Stmt::Assign(var, expr) => self.assign_forward(var, expr, pre),
            Stmt::Seq(first, second) => {
                let mid = self.forward_sp(first, pre);
                self.forward_sp(second, &mid)
            }
            Stmt::Ite(guard, then_branch, else_branch) => {
                let guard_set = self.guard_set(guard);
                let then_post = self.forward_sp(then_branch, &pre.intersect(&guard_set));
                let else_post =
                    self.forward_sp(else_branch, &pre.intersect(&guard_set.complement()));
                then_post.union(&else_post)
            }
            Stmt::While(guard, body) => {
                let guard_set = self.guard_set(guard);
                let label = format!("while ({guard})");
                let reached = self.kleene(FixpointPolarity::Least, label, |engine, y| {
                    pre.union(&engine.forward_sp(body, &y.intersect(&guard_set)))
                });
                guard_set.complement().intersect(&reached)
            }
        }
    }

    fn forward_slp(&mut self, program: &Stmt, pre: &StateSet) -> StateSet {
        match program {
            Stmt::Diverge => StateSet::full(self.space.size()),
            Stmt::Skip => panic!("skip must be desugared before analysis"),
            Stmt::Assign(var, expr) => self
                .assign_forward(var, expr, &pre.complement())
                .complement(),
            Stmt::Seq(first, second) => {
                let mid = self.forward_slp(first, pre);
                self.forward_slp(second, &mid)
            }
            Stmt::Ite(guard, then_branch, else_branch) => {
                let guard_set = self.guard_set(guard);
                let then_post =
                    self.forward_slp(then_branch, &guard_set.complement().union(pre));
                let else_post = self.forward_slp(else_branch, &guard_set.union(pre));
                then_post.intersect(&else_post)
            }
            Stmt::While(guard, body) => {
                let guard_set = self.guard_set(guard);
                let not_guard = guard_set.complement();
                let label = format!("while ({guard})");
                let inner = self.kleene(FixpointPolarity::Greatest, label, |engine, y| {
                    pre.intersect(&engine.forward_slp(body, &not_guard.union(y)))
                });
                guard_set.union(&inner)
            }
        }
    }

    /// Iterate a monotone step to its fixed point, from the bottom for
    /// least and from the top for greatest. Converges within
    /// `|States| + 1` applications; the trace records the iterate sizes.
    fn kleene(
        &mut self,
        polarity: FixpointPolarity,
        loop_label: String,
        step: impl Fn(&mut Self, &StateSet) -> StateSet,
    ) -> StateSet {
        let mut current = match polarity {
            FixpointPolarity::Least => StateSet::empty(self.space.size()),
            FixpointPolarity::Greatest => StateSet::full(self.space.size()),
        };
        let bound = self.space.size() + 1;
        let mut sizes = vec![current.count()];
        let mut iterations = 0;
        let mut converged = false;
        while iterations < bound {
            let next = step(self, &current);
            iterations += 1;
            sizes.push(next.count());
            if next == current {
                converged = true;
                break;
            }
            current = next;
        }
        self.traces.push(FixpointTrace {
            transformer: self.active,
            polarity,
            loop_label,
            iterations,
            sizes,
            converged,
        });
        debug_assert!(converged, "Kleene iteration failed to stabilize within |States|+1 steps");
        current
    }
}

/// Image of `pre` under the assignment `var := expr`, with the assigned
/// value wrapped into the variable's domain.
pub(crate) fn assign_image(
    space: &StateSpace,
    var: &str,
    expr: &crate::syntax::Expr,
    pre: &StateSet,
) -> StateSet {
    let vi = space
        .var_index(var)
        .unwrap_or_else(|| panic!("undeclared variable `{var}`"));
    let mut result = StateSet::empty(space.size());
    let mut state = State(Vec::new());
    for idx in pre.iter_ones() {
        space.state_at_into(idx, &mut state);
        let value = space.eval_expr(expr, &state);
        state.set(vi, space.wrap(vi, value));
        result.insert(space.index_of(&state));
    }
    result
}

/// One annotated program point: its label, nesting depth, extension, and a
/// formula rendering that predicate.
#[derive(Debug, Clone)]
pub struct Annotation {
    pub label: String,
    pub depth: usize,
    pub set: StateSet,
    pub formula: Formula,
}

/// Forward annotation of a program in source order: the
/// precondition, every interior point (branch entries/exits, sequence
/// midpoints, loop bodies at the stable iterate), and the final
/// postcondition.
///
/// In `Slp` mode the formulas come from the syntactic rule engine and each
/// point's extension is cross-checked against them; the returned flag is
/// false if any point disagrees. In `Sp` mode sets are computed
/// semantically and formulas are canonical renderings.
pub fn annotate(
    space: &StateSpace,
    program: &Stmt,
    pre: &Formula,
    kind: TransformerKind,
) -> (Vec<Annotation>, bool) {
    match kind {
        TransformerKind::Slp => {
            let run = crate::slp_rules::slp_run(program, pre, space, true);
            let mut agreement = true;
            let mut annotations = Vec::new();
            for point in run.points {
                let set = states_of(&point.formula, space);
                if set != point.set {
                    agreement = false;
                }
                annotations.push(Annotation {
                    label: point.label,
                    depth: point.depth,
                    set: point.set,
                    formula: crate::slp_rules::simplify(&point.formula, space),
                });
            }
            (annotations, agreement)
        }
        TransformerKind::Sp => {
            let mut engine = Engine::new(space);
            let pre_set = states_of(pre, space);
            let mut annotations = vec![Annotation {
                label: "pre".to_string(),
                depth: 0,
                set: pre_set.clone(),
                formula: pre.clone(),
            }];
            let final_set = annotate_sp(&mut engine, program, &pre_set, 0, &mut annotations);
            annotations.push(Annotation {
                label: "post".to_string(),
                depth: 0,
                set: final_set.clone(),
                formula: formula_of_set(&final_set, space),
            });
            (annotations, true)
        }
        other => panic!("annotate is a forward mode; `{other}` is not supported"),
    }
}

fn annotate_sp(
    engine: &mut Engine,
    program: &Stmt,
    pre: &StateSet,
    depth: usize,
    out: &mut Vec<Annotation>,
) -> StateSet {
    let space = engine.space();
    let push = |out: &mut Vec<Annotation>, label: String, depth: usize, set: &StateSet| {
        out.push(Annotation {
            label,
            depth,
            set: set.clone(),
            formula: formula_of_set(set, space),
        });
    };
    match program {
        Stmt::Seq(first, second) => {
            let mid = annotate_sp(engine, first, pre, depth, out);
            push(out, format!("after {first}"), depth, &mid);
            annotate_sp(engine, second, &mid, depth, out)
        }
        Stmt::Ite(guard, then_branch, else_branch) => {
            let guard_set = states_of(guard, space);
            let then_in = pre.intersect(&guard_set);
            push(out, "then entry".to_string(), depth + 1, &then_in);
            let then_out = annotate_sp(engine, then_branch, &then_in, depth + 1, out);
            push(out, "then exit".to_string(), depth + 1, &then_out);
            let else_in = pre.intersect(&guard_set.complement());
            push(out, "else entry".to_string(), depth + 1, &else_in);
            let else_out = annotate_sp(engine, else_branch, &else_in, depth + 1, out);
            push(out, "else exit".to_string(), depth + 1, &else_out);
            then_out.union(&else_out)
        }
        other => engine.sp(other, pre),
    }
}
