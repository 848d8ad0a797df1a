//! Extensional meaning of formulas as state sets, plus capture-avoiding
//! substitution for the syntactic rule engine.

use crate::statespace::{eval_expr_env, State, StateSet, StateSpace};
use crate::syntax::{Expr, Formula, Quantifier};
use std::collections::BTreeSet;

/// Evaluate a formula under an arbitrary variable lookup. Quantifier
/// bindings shadow the lookup for their scope.
pub fn eval_formula_env(formula: &Formula, lookup: &mut impl FnMut(&str) -> i64) -> bool {
    let mut bindings: Vec<(String, i64)> = Vec::new();
    eval_inner(formula, lookup, &mut bindings)
}

fn eval_inner(
    formula: &Formula,
    lookup: &mut impl FnMut(&str) -> i64,
    bindings: &mut Vec<(String, i64)>,
) -> bool {
    fn resolve(
        name: &str,
        lookup: &mut impl FnMut(&str) -> i64,
        bindings: &[(String, i64)],
    ) -> i64 {
        for (bound, value) in bindings.iter().rev() {
            if bound == name {
                return *value;
            }
        }
        lookup(name)
    }

    match formula {
        Formula::Bool(b) => *b,
        Formula::Var(name) => resolve(name, lookup, bindings) != 0,
        Formula::Cmp(op, lhs, rhs) => {
            let l = eval_expr_env(lhs, &mut |n| resolve(n, lookup, bindings));
            let r = eval_expr_env(rhs, &mut |n| resolve(n, lookup, bindings));
            op.eval(l, r)
        }
        Formula::Not(inner) => !eval_inner(inner, lookup, bindings),
        Formula::And(lhs, rhs) => {
            eval_inner(lhs, lookup, bindings) && eval_inner(rhs, lookup, bindings)
        }
        Formula::Or(lhs, rhs) => {
            eval_inner(lhs, lookup, bindings) || eval_inner(rhs, lookup, bindings)
        }
        Formula::Implies(lhs, rhs) => {
            !eval_inner(lhs, lookup, bindings) || eval_inner(rhs, lookup, bindings)
        }
        Formula::Quant { q, var, lo, hi, body } => {
            let mut result = matches!(q, Quantifier::Forall);
            for value in *lo..=*hi {
                bindings.push((var.clone(), value));
                let holds = eval_inner(body, lookup, bindings);
                bindings.pop();
                match q {
                    Quantifier::Forall if !holds => {
                        result = false;
                        break;
                    }
                    Quantifier::Exists if holds => {
                        result = true;
                        break;
                    }
                    _ => {}
                }
            }
            result
        }
    }
}

/// Evaluate a formula at a concrete state of the space.
pub fn eval_formula(formula: &Formula, space: &StateSpace, state: &State) -> bool {
    eval_formula_env(formula, &mut |name| {
        let idx = space
            .var_index(name)
            .unwrap_or_else(|| panic!("undeclared variable `{name}` in formula"));
        state.get(idx)
    })
}

/// The extension of a formula: exactly the states satisfying it.
pub fn states_of(formula: &Formula, space: &StateSpace) -> StateSet {
    let mut set = StateSet::empty(space.size());
    let mut state = State(Vec::new());
    for idx in 0..space.size() {
        space.state_at_into(idx, &mut state);
        if eval_formula(formula, space, &state) {
            set.insert(idx);
        }
    }
    set
}

/// Extensional equality of two formulas over a space.
pub fn equivalent(f: &Formula, g: &Formula, space: &StateSpace) -> bool {
    states_of(f, space) == states_of(g, space)
}

/// A canonical formula with exactly the given extension: `true`/`false`
/// for the trivial sets, otherwise a disjunction of state descriptions
/// (over whichever of the set and its complement is smaller).
pub fn formula_of_set(set: &StateSet, space: &StateSpace) -> Formula {
    if set.is_empty() {
        return Formula::Bool(false);
    }
    if set.is_full() {
        return Formula::Bool(true);
    }
    let (inner, negate) = if set.count() * 2 <= space.size() {
        (set.clone(), false)
    } else {
        (set.complement(), true)
    };
    let disjuncts: Vec<Formula> = inner
        .iter_ones()
        .map(|idx| state_formula(idx, space))
        .collect();
    let body = disjuncts
        .into_iter()
        .rev()
        .reduce(|acc, d| Formula::or(d, acc))
        .expect("nonempty set");
    if negate {
        Formula::not(body)
    } else {
        body
    }
}

fn state_formula(idx: usize, space: &StateSpace) -> Formula {
    let state = space.state_at(idx);
    let conjuncts: Vec<Formula> = space
        .decls()
        .iter()
        .enumerate()
        .map(|(i, d)| match d.domain {
            crate::syntax::Domain::Bool => {
                if state.get(i) != 0 {
                    Formula::Var(d.name.clone())
                } else {
                    Formula::not(Formula::Var(d.name.clone()))
                }
            }
            crate::syntax::Domain::Int { .. } => Formula::Cmp(
                crate::syntax::CmpOp::Eq,
                Expr::Var(d.name.clone()),
                Expr::Const(state.get(i)),
            ),
        })
        .collect();
    conjuncts
        .into_iter()
        .rev()
        .reduce(|acc, c| Formula::and(c, acc))
        .unwrap_or(Formula::Bool(true))
}

/// Pick a name based on `base` that does not occur in `avoid`, priming
/// with `'` until fresh.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut candidate = base.to_string();
    while avoid.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

/// Substitute `expr` for every occurrence of `var` in an expression.
pub fn subst_expr(target: &Expr, var: &str, expr: &Expr) -> Expr {
    match target {
        Expr::Const(n) => Expr::Const(*n),
        Expr::Var(name) => {
            if name == var {
                expr.clone()
            } else {
                Expr::Var(name.clone())
            }
        }
        Expr::Bin(op, lhs, rhs) => Expr::bin(
            *op,
            subst_expr(lhs, var, expr),
            subst_expr(rhs, var, expr),
        ),
    }
}

/// Rename one variable throughout a formula, preserving shape. Both
/// expression reads and boolean-atom uses are renamed.
fn rename_var(formula: &Formula, from: &str, to: &str) -> Formula {
    match formula {
        Formula::Bool(b) => Formula::Bool(*b),
        Formula::Var(name) => Formula::Var(if name == from { to.to_string() } else { name.clone() }),
        Formula::Cmp(op, lhs, rhs) => Formula::Cmp(
            *op,
            subst_expr(lhs, from, &Expr::Var(to.to_string())),
            subst_expr(rhs, from, &Expr::Var(to.to_string())),
        ),
        Formula::Not(inner) => Formula::not(rename_var(inner, from, to)),
        Formula::And(lhs, rhs) => {
            Formula::and(rename_var(lhs, from, to), rename_var(rhs, from, to))
        }
        Formula::Or(lhs, rhs) => Formula::or(rename_var(lhs, from, to), rename_var(rhs, from, to)),
        Formula::Implies(lhs, rhs) => {
            Formula::implies(rename_var(lhs, from, to), rename_var(rhs, from, to))
        }
        Formula::Quant { q, var, lo, hi, body } => {
            if var == from {
                Formula::Quant {
                    q: *q,
                    var: var.clone(),
                    lo: *lo,
                    hi: *hi,
                    body: body.clone(),
                }
            } else {
                Formula::Quant {
                    q: *q,
                    var: var.clone(),
                    lo: *lo,
                    hi: *hi,
                    body: Box::new(rename_var(body, from, to)),
                }
            }
        }
    }
}

/// Capture-avoiding substitution of `expr` for `var`. A boolean-atom use
/// of `var` becomes `expr != 0`; bound variables that would capture a
/// free name of `expr` are renamed fresh.
pub fn substitute(formula: &Formula, var: &str, expr: &Expr) -> Formula {
    let mut avoid = formula.all_names();
    avoid.extend(expr.vars());
    substitute_avoiding(formula, var, expr, &avoid)
}

/// As [`substitute`], with an explicit avoid-set for fresh binder names.
/// Callers that know the declared variables should include them so renamed
/// binders never collide with a declaration.
pub fn substitute_avoiding(
    formula: &Formula,
    var: &str,
    expr: &Expr,
    avoid: &BTreeSet<String>,
) -> Formula {
    match formula {
        Formula::Bool(b) => Formula::Bool(*b),
        Formula::Var(name) => {
            if name == var {
                Formula::Cmp(crate::syntax::CmpOp::Ne, expr.clone(), Expr::Const(0))
            } else {
                Formula::Var(name.clone())
            }
        }
        Formula::Cmp(op, lhs, rhs) => {
            Formula::Cmp(*op, subst_expr(lhs, var, expr), subst_expr(rhs, var, expr))
        }
        Formula::Not(inner) => Formula::not(substitute_avoiding(inner, var, expr, avoid)),
        Formula::And(lhs, rhs) => Formula::and(
            substitute_avoiding(lhs, var, expr, avoid),
            substitute_avoiding(rhs, var, expr, avoid),
        ),
        Formula::Or(lhs, rhs) => Formula::or(
            substitute_avoiding(lhs, var, expr, avoid),
            substitute_avoiding(rhs, var, expr, avoid),
        ),
        Formula::Implies(lhs, rhs) => Formula::implies(
            substitute_avoiding(lhs, var, expr, avoid),
            substitute_avoiding(rhs, var, expr, avoid),
        ),
        Formula::Quant { q, var: bound, lo, hi, body } => {
            if bound == var {
                // The binder shadows the substituted variable.
                formula.clone()
            } else if expr.vars().contains(bound) {
                let mut wider = avoid.clone();
                wider.extend(body.all_names());
                wider.insert(var.to_string());
                let renamed = fresh_name(bound, &wider);
                let body = rename_var(body, bound, &renamed);
                Formula::Quant {
                    q: *q,
                    var: renamed,
                    lo: *lo,
                    hi: *hi,
                    body: Box::new(substitute_avoiding(&body, var, expr, avoid)),
                }
            } else {
                Formula::Quant {
                    q: *q,
                    var: bound.clone(),
                    lo: *lo,
                    hi: *hi,
                    body: Box::new(substitute_avoiding(body, var, expr, avoid)),
                }
            }
        }
    }
}
