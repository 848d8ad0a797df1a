//! Syntactic engine for the strongest liberal postcondition: rewrites an
//! input formula statement by statement and produces an output *formula*,
//! not just a set.
//!
//! The assignment rule introduces a fresh bound variable ranging over the
//! assigned variable's declared domain, and compares against the assigned
//! value as actually stored, i.e. wrapped into the domain when the
//! expression can leave it. The loop rule iterates its greatest fixed
//! point from `true`, detecting convergence semantically (extension
//! equality over the finite space), since syntactic iterates need not
//! stabilize.
//!
//! The engine carries the extension of every intermediate formula
//! alongside it, computed by independent set operations; the two are
//! cross-checked by the engine-agreement suite. When an iterate's
//! evaluation cost would blow up (deeply nested quantifiers), the carried
//! formula is replaced by a canonical equivalent of its extension.

use crate::eval::{formula_of_set, fresh_name, states_of, subst_expr, substitute, substitute_avoiding};
use crate::statespace::{expr_interval, StateSet, StateSpace};
use crate::syntax::{BinOp, CmpOp, Domain, Expr, Formula, Quantifier, Stmt, TransformerKind};
use crate::transformers::{assign_image, FixpointPolarity, FixpointTrace};
use std::collections::BTreeSet;

/// One rule application, for `--annotate` symbolic output.
#[derive(Debug, Clone)]
pub struct RuleStep {
    pub rule: &'static str,
    pub input: Formula,
    pub output: Formula,
}

/// An annotated program point produced by the walk, in source order.
#[derive(Debug, Clone)]
pub struct SlpPoint {
    pub label: String,
    pub depth: usize,
    pub formula: Formula,
    pub set: StateSet,
}

/// Result of a full syntactic slp computation.
#[derive(Debug, Clone)]
pub struct SlpRun {
    pub formula: Formula,
    pub set: StateSet,
    pub steps: Vec<RuleStep>,
    pub points: Vec<SlpPoint>,
    pub traces: Vec<FixpointTrace>,
}

/// Apply the slp rewrite rules to a desugared program, returning the
/// output formula and the rule-step log.
pub fn slp_formula(program: &Stmt, pre: &Formula, space: &StateSpace) -> (Formula, Vec<RuleStep>) {
    let run = slp_run(program, pre, space, false);
    (run.formula, run.steps)
}

/// Full walk; with `collect_points` it also emits per-program-point
/// annotations (pre, branch entries/exits, sequence midpoints, loop bodies
/// at the stable iterate, post).
pub fn slp_run(program: &Stmt, pre: &Formula, space: &StateSpace, collect_points: bool) -> SlpRun {
    let mut walker = Walker {
        space,
        decl_names: space.decls().iter().map(|d| d.name.clone()).collect(),
        steps: Vec::new(),
        points: Vec::new(),
        traces: Vec::new(),
    };
    let pre_set = states_of(pre, space);
    if collect_points {
        walker.point("pre", 0, pre, &pre_set);
    }
    let (formula, set) = walker.walk(program, pre.clone(), pre_set, 0, collect_points);
    if collect_points {
        walker.point("post", 0, &formula, &set);
    }
    SlpRun {
        formula,
        set,
        steps: walker.steps,
        points: walker.points,
        traces: walker.traces,
    }
}

/// Per-state evaluation budget before an iterate is canonicalized. Nested
/// quantifier ranges multiply, so this is what keeps loop iterates and
/// long assignment chains evaluable.
const EVAL_BUDGET: u64 = 200_000;

struct Walker<'a> {
    space: &'a StateSpace,
    decl_names: BTreeSet<String>,
    steps: Vec<RuleStep>,
    points: Vec<SlpPoint>,
    traces: Vec<FixpointTrace>,
}

impl<'a> Walker<'a> {
    fn point(&mut self, label: impl Into<String>, depth: usize, formula: &Formula, set: &StateSet) {
        self.points.push(SlpPoint {
            label: label.into(),
            depth,
            formula: formula.clone(),
            set: set.clone(),
        });
    }

    fn step(&mut self, rule: &'static str, input: &Formula, output: &Formula) {
        self.steps.push(RuleStep {
            rule,
            input: input.clone(),
            output: output.clone(),
        });
    }

    /// Replace a formula by a canonical equivalent when evaluating it has
    /// become too expensive. Extension-preserving by construction.
    fn tame(&self, formula: Formula, set: &StateSet) -> Formula {
        if eval_cost(&formula) > EVAL_BUDGET {
            formula_of_set(set, self.space)
        } else {
            formula
        }
    }

    fn walk(
        &mut self,
        stmt: &Stmt,
        pre_f: Formula,
        pre_s: StateSet,
        depth: usize,
        emit: bool,
    ) -> (Formula, StateSet) {
        match stmt {
            Stmt::Diverge => {
                let out = Formula::Bool(true);
                self.step("diverge", &pre_f, &out);
                (out, StateSet::full(self.space.size()))
            }
            Stmt::Skip => panic!("skip must be desugared before analysis"),
            Stmt::Assign(var, expr) => {
                let out_f = self.assign_rule(var, expr, &pre_f);
                let out_s = assign_image(self.space, var, expr, &pre_s.complement()).complement();
                self.step("assign", &pre_f, &out_f);
                let out_f = self.tame(out_f, &out_s);
                (out_f, out_s)
            }
            Stmt::Seq(first, second) => {
                let (mid_f, mid_s) = self.walk(first, pre_f.clone(), pre_s, depth, emit);
                if emit {
                    self.point(format!("after {first}"), depth, &mid_f, &mid_s);
                }
                let (out_f, out_s) = self.walk(second, mid_f, mid_s, depth, emit);
                self.step("seq", &pre_f, &out_f);
                (out_f, out_s)
            }
            Stmt::Ite(guard, then_branch, else_branch) => {
                let guard_set = states_of(guard, self.space);
                let then_in_f = Formula::or(Formula::not(guard.clone()), pre_f.clone());
                let then_in_s = guard_set.complement().union(&pre_s);
                if emit {
                    self.point("then entry", depth + 1, &then_in_f, &then_in_s);
                }
                let (then_f, then_s) = self.walk(then_branch, then_in_f, then_in_s, depth + 1, emit);
                if emit {
                    self.point("then exit", depth + 1, &then_f, &then_s);
                }
                let else_in_f = Formula::or(guard.clone(), pre_f.clone());
                let else_in_s = guard_set.union(&pre_s);
                if emit {
                    self.point("else entry", depth + 1, &else_in_f, &else_in_s);
                }
                let (else_f, else_s) = self.walk(else_branch, else_in_f, else_in_s, depth + 1, emit);
                if emit {
                    self.point("else exit", depth + 1, &else_f, &else_s);
                }
                let out_f = Formula::and(then_f, else_f);
                let out_s = then_s.intersect(&else_s);
                self.step("ite", &pre_f, &out_f);
                let out_f = self.tame(out_f, &out_s);
                (out_f, out_s)
            }
            Stmt::While(guard, body) => {
                let guard_set = states_of(guard, self.space);
                let not_guard_f = Formula::not(guard.clone());
                let not_guard_s = guard_set.complement();

                let mut iterate_f = Formula::Bool(true);
                let mut iterate_s = StateSet::full(self.space.size());
                let bound = self.space.size() + 1;
                let mut sizes = vec![iterate_s.count()];
                let mut iterations = 0;
                let mut converged = false;
                while iterations < bound {
                    let ctx_f = Formula::or(not_guard_f.clone(), iterate_f.clone());
                    let ctx_s = not_guard_s.union(&iterate_s);
                    let (body_f, body_s) = self.walk(body, ctx_f, ctx_s, depth + 1, false);
                    let next_f = Formula::and(pre_f.clone(), body_f);
                    let next_s = pre_s.intersect(&body_s);
                    iterations += 1;
                    sizes.push(next_s.count());
                    if next_s == iterate_s {
                        converged = true;
                        break;
                    }
                    iterate_s = next_s;
                    iterate_f = self.tame(next_f, &iterate_s);
                }
                self.traces.push(FixpointTrace {
                    transformer: TransformerKind::Slp,
                    polarity: FixpointPolarity::Greatest,
                    loop_label: format!("while ({guard})"),
                    iterations,
                    sizes,
                    converged,
                });
                debug_assert!(converged, "slp loop iterate failed to stabilize");

                if emit {
                    // One more pass over the body at the stable iterate,
                    // this time with annotations on.
                    let ctx_f = Formula::or(not_guard_f.clone(), iterate_f.clone());
                    let ctx_s = not_guard_s.union(&iterate_s);
                    self.point("loop body entry", depth + 1, &ctx_f, &ctx_s);
                    let (body_f, body_s) = self.walk(body, ctx_f, ctx_s, depth + 1, true);
                    self.point("loop body exit", depth + 1, &body_f, &body_s);
                }

                let out_f = Formula::or(guard.clone(), iterate_f);
                let out_s = guard_set.union(&iterate_s);
                self.step("while", &pre_f, &out_f);
                let out_f = self.tame(out_f, &out_s);
                (out_f, out_s)
            }
        }
    }

    /// Table rule for `x := e`: for a fresh `a` over x's declared domain,
    /// `forall a: x != <e with x := a, wrapped> || F[x/a]`.
    fn assign_rule(&mut self, var: &str, expr: &Expr, pre: &Formula) -> Formula {
        let vi = self
            .space
            .var_index(var)
            .unwrap_or_else(|| panic!("undeclared variable `{var}`"));
        let dom = self.space.domain(vi);

        let mut avoid = self.decl_names.clone();
        avoid.extend(pre.all_names());
        avoid.extend(expr.vars());
        let alpha = fresh_name("a", &avoid);

        let value_before = subst_expr(expr, var, &Expr::Var(alpha.clone()));
        let in_range = match expr_interval(expr, self.space) {
            Some((lo, hi)) => lo >= dom.lo() as i128 && hi <= dom.hi() as i128,
            None => false,
        };
        let assigned = if in_range {
            value_before
        } else {
            wrap_expr(value_before, dom)
        };
        let mismatch = Formula::Cmp(CmpOp::Ne, Expr::Var(var.to_string()), assigned);
        let pre_sub = substitute_avoiding(pre, var, &Expr::Var(alpha.clone()), &avoid);
        Formula::Quant {
            q: Quantifier::Forall,
            var: alpha,
            lo: dom.lo(),
            hi: dom.hi(),
            body: Box::new(Formula::or(mismatch, pre_sub)),
        }
    }
}

/// Syntactic wrap of an expression into a domain, matching the assignment
/// semantics: `lo + ((e - lo) % n)` with Euclidean `%`.
fn wrap_expr(expr: Expr, dom: Domain) -> Expr {
    let n = Expr::Const(dom.size() as i64);
    if dom.lo() == 0 {
        Expr::bin(BinOp::Mod, expr, n)
    } else {
        let shifted = Expr::bin(BinOp::Sub, expr, Expr::Const(dom.lo()));
        Expr::bin(
            BinOp::Add,
            Expr::Const(dom.lo()),
            Expr::bin(BinOp::Mod, shifted, n),
        )
    }
}

fn expr_nodes(expr: &Expr) -> u64 {
    match expr {
        Expr::Const(_) | Expr::Var(_) => 1,
        Expr::Bin(_, lhs, rhs) => 1 + expr_nodes(lhs) + expr_nodes(rhs),
    }
}

/// Upper bound on the per-state cost of evaluating a formula, accounting
/// for quantifier ranges multiplying.
pub fn eval_cost(formula: &Formula) -> u64 {
    match formula {
        Formula::Bool(_) | Formula::Var(_) => 1,
        Formula::Cmp(_, lhs, rhs) => 1 + expr_nodes(lhs) + expr_nodes(rhs),
        Formula::Not(inner) => 1 + eval_cost(inner),
        Formula::And(lhs, rhs) | Formula::Or(lhs, rhs) | Formula::Implies(lhs, rhs) => {
            1u64.saturating_add(eval_cost(lhs)).saturating_add(eval_cost(rhs))
        }
        Formula::Quant { lo, hi, body, .. } => {
            let range = (*hi - *lo) as u64 + 1;
            range.saturating_mul(eval_cost(body)).saturating_add(1)
        }
    }
}

pub fn node_count(formula: &Formula) -> u64 {
    match formula {
        Formula::Bool(_) | Formula::Var(_) => 1,
        Formula::Cmp(_, lhs, rhs) => 1 + expr_nodes(lhs) + expr_nodes(rhs),
        Formula::Not(inner) => 1 + node_count(inner),
        Formula::And(lhs, rhs) | Formula::Or(lhs, rhs) | Formula::Implies(lhs, rhs) => {
            1 + node_count(lhs) + node_count(rhs)
        }
        Formula::Quant { body, .. } => 1 + node_count(body),
    }
}

fn fold_expr(expr: &Expr) -> Expr {
    match expr {
        Expr::Const(_) | Expr::Var(_) => expr.clone(),
        Expr::Bin(op, lhs, rhs) => {
            let lhs = fold_expr(lhs);
            let rhs = fold_expr(rhs);
            if let (Expr::Const(a), Expr::Const(b)) = (&lhs, &rhs) {
                let value = crate::statespace::eval_expr_env(
                    &Expr::bin(*op, Expr::Const(*a), Expr::Const(*b)),
                    &mut |_| unreachable!(),
                );
                if let Ok(small) = i64::try_from(value) {
                    return Expr::Const(small);
                }
            }
            Expr::bin(*op, lhs, rhs)
        }
    }
}

/// Extension-preserving cleanup: constant folding, unit laws, double
/// negation, and quantifier expansion for small ranges. `simplify(f)` is
/// always equivalent to `f` over the space.
#[allow(clippy::only_used_in_recursion)]
pub fn simplify(formula: &Formula, space: &StateSpace) -> Formula {
    match formula {
        Formula::Bool(b) => Formula::Bool(*b),
        Formula::Var(name) => Formula::Var(name.clone()),
        Formula::Cmp(op, lhs, rhs) => {
            let lhs = fold_expr(lhs);
            let rhs = fold_expr(rhs);
            if let (Expr::Const(a), Expr::Const(b)) = (&lhs, &rhs) {
                return Formula::Bool(op.eval(*a as i128, *b as i128));
            }
            if lhs == rhs {
                return match op {
                    CmpOp::Eq | CmpOp::Le | CmpOp::Ge => Formula::Bool(true),
                    CmpOp::Ne | CmpOp::Lt | CmpOp::Gt => Formula::Bool(false),
                };
            }
            Formula::Cmp(*op, lhs, rhs)
        }
        Formula::Not(inner) => match simplify(inner, space) {
            Formula::Bool(b) => Formula::Bool(!b),
            Formula::Not(inner) => *inner,
            other => Formula::not(other),
        },
        Formula::And(lhs, rhs) => {
            let lhs = simplify(lhs, space);
            let rhs = simplify(rhs, space);
            match (lhs, rhs) {
                (Formula::Bool(false), _) | (_, Formula::Bool(false)) => Formula::Bool(false),
                (Formula::Bool(true), f) | (f, Formula::Bool(true)) => f,
                (lhs, rhs) if lhs == rhs => lhs,
                (lhs, rhs) => Formula::and(lhs, rhs),
            }
        }
        Formula::Or(lhs, rhs) => {
            let lhs = simplify(lhs, space);
            let rhs = simplify(rhs, space);
            match (lhs, rhs) {
                (Formula::Bool(true), _) | (_, Formula::Bool(true)) => Formula::Bool(true),
                (Formula::Bool(false), f) | (f, Formula::Bool(false)) => f,
                (lhs, rhs) if lhs == rhs => lhs,
                (lhs, rhs) => Formula::or(lhs, rhs),
            }
        }
        Formula::Implies(lhs, rhs) => {
            let lhs = simplify(lhs, space);
            let rhs = simplify(rhs, space);
            match (lhs, rhs) {
                (Formula::Bool(false), _) => Formula::Bool(true),
                (_, Formula::Bool(true)) => Formula::Bool(true),
                (Formula::Bool(true), f) => f,
                (f, Formula::Bool(false)) => simplify(&Formula::not(f), space),
                (lhs, rhs) if lhs == rhs => Formula::Bool(true),
                (lhs, rhs) => Formula::implies(lhs, rhs),
            }
        }
        Formula::Quant { q, var, lo, hi, body } => {
            let body = simplify(body, space);
            if let Formula::Bool(b) = body {
                return Formula::Bool(b);
            }
            if !body.free_vars().contains(var) {
                return body;
            }
            let range = (*hi - *lo) as u64 + 1;
            if range == 1 {
                return simplify(&substitute(&body, var, &Expr::Const(*lo)), space);
            }
            if range <= 8 && node_count(&body).saturating_mul(range) <= 256 {
                let parts: Vec<Formula> = (*lo..=*hi)
                    .map(|v| simplify(&substitute(&body, var, &Expr::Const(v)), space))
                    .collect();
                let folded = parts
                    .into_iter()
                    .rev()
                    .reduce(|acc, p| match q {
                        Quantifier::Forall => Formula::and(p, acc),
                        Quantifier::Exists => Formula::or(p, acc),
                    })
                    .expect("nonempty range");
                return simplify(&folded, space);
            }
            Formula::Quant {
                q: *q,
                var: var.clone(),
                lo: *lo,
                hi: *hi,
                body: Box::new(body),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::equivalent;
    use crate::parser::{parse_formula, parse_stmt};
    use crate::statespace::StateSpace;
    use crate::syntax::VarDecl;
    use crate::transformers::Engine;

    fn decl(name: &str, domain: Domain) -> VarDecl {
        VarDecl { name: name.to_string(), domain }
    }

    fn space(decls: &[VarDecl]) -> StateSpace {
        StateSpace::enumerate(decls, 1 << 20).unwrap()
    }

    #[test]
    fn diverge_rule_yields_true() {
        let sp = space(&[decl("x", Domain::Bool)]);
        let (out, steps) = slp_formula(&Stmt::Diverge, &parse_formula("x").unwrap(), &sp);
        assert_eq!(out, Formula::Bool(true));
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].rule, "diverge");
    }

    #[test]
    fn assignment_rule_quantifies_over_the_domain() {
        let sp = space(&[decl("y", Domain::Int { lo: 0, hi: 31 })]);
        let prog = parse_stmt("y := y + 1").unwrap();
        let (out, _) = slp_formula(&prog, &parse_formula("y == 10").unwrap(), &sp);
        assert_eq!(out.to_string(), "forall a in 0..31: y != (a + 1) % 32 || a == 10");
        // Extensionally: increments are a bijection on the wrapped domain,
        // so the unique reachable state is y = 11.
        let expect = parse_formula("y == 11").unwrap();
        assert!(equivalent(&out, &expect, &sp));
    }

    #[test]
    fn assignment_rule_skips_wrap_when_value_stays_in_range() {
        let sp = space(&[decl("x", Domain::Int { lo: 0, hi: 31 })]);
        let prog = parse_stmt("x := x").unwrap();
        let (out, _) = slp_formula(&prog, &parse_formula("x == 3").unwrap(), &sp);
        assert_eq!(out.to_string(), "forall a in 0..31: x != a || a == 3");
    }

    #[test]
    fn branching_example_matches_semantic_engine() {
        let d = Domain::Int { lo: 0, hi: 31 };
        let sp = space(&[decl("x", d), decl("y", d)]);
        let prog = parse_stmt("if (x % 2 == 0) { y := y + 1 } else { y := 2 * y }").unwrap();
        let pre = parse_formula("y == 10").unwrap();
        let run = slp_run(&prog, &pre, &sp, false);
        let mut engine = Engine::new(&sp);
        let semantic = engine.slp(&prog, &states_of(&pre, &sp));
        assert_eq!(states_of(&run.formula, &sp), semantic);
        assert_eq!(run.set, semantic);
    }

    #[test]
    fn loop_rule_converges_semantically() {
        let sp = space(&[decl("x", Domain::Int { lo: 0, hi: 4 })]);
        let prog = parse_stmt("while (x < 3) { x := x + 1 }").unwrap();
        let pre = parse_formula("x == 0").unwrap();
        let run = slp_run(&prog, &pre, &sp, false);
        let mut engine = Engine::new(&sp);
        let semantic = engine.slp(&prog, &states_of(&pre, &sp));
        assert_eq!(states_of(&run.formula, &sp), semantic);
        assert!(run.traces.iter().all(|t| t.converged));
        assert!(run.traces.iter().all(|t| t.iterations <= sp.size() + 1));
    }

    #[test]
    fn deep_assignment_chains_stay_evaluable() {
        let sp = space(&[
            decl("x", Domain::Int { lo: 0, hi: 4 }),
            decl("y", Domain::Int { lo: 0, hi: 4 }),
        ]);
        let text = vec!["x := y * 0"; 14].join("; ");
        let prog = parse_stmt(&text).unwrap();
        let pre = parse_formula("x == 0 && y == 2").unwrap();
        let run = slp_run(&prog, &pre, &sp, false);
        assert!(eval_cost(&run.formula) <= EVAL_BUDGET);
        let mut engine = Engine::new(&sp);
        let semantic = engine.slp(&prog, &states_of(&pre, &sp));
        assert_eq!(states_of(&run.formula, &sp), semantic);
    }

    #[test]
    fn simplify_unit_laws() {
        let sp = space(&[decl("x", Domain::Int { lo: 0, hi: 3 })]);
        let f = parse_formula("true || x == 1").unwrap();
        assert_eq!(simplify(&f, &sp), Formula::Bool(true));
        let g = parse_formula("!(!(x == 1))").unwrap();
        assert_eq!(simplify(&g, &sp).to_string(), "x == 1");
        let h = parse_formula("false || x == 2").unwrap();
        assert_eq!(simplify(&h, &sp).to_string(), "x == 2");
    }

    #[test]
    fn simplify_expands_singleton_quantifiers() {
        let sp = space(&[decl("x", Domain::Int { lo: 0, hi: 3 })]);
        let f = parse_formula("forall a in 0..0: x != a").unwrap();
        assert_eq!(simplify(&f, &sp).to_string(), "x != 0");
    }

    #[test]
    fn simplify_preserves_extension() {
        let sp = space(&[
            decl("x", Domain::Int { lo: 0, hi: 4 }),
            decl("b", Domain::Bool),
        ]);
        for text in [
            "forall a in 0..3: x != a || b",
            "(x == 0 || true) && (b || x % 2 == 1)",
            "exists a in 0..2: x == a + a",
            "!(b && x == x)",
            "1 + 2 == 3 && b",
        ] {
            let f = parse_formula(text).unwrap();
            let s = simplify(&f, &sp);
            assert!(equivalent(&f, &s, &sp), "simplify changed extension of {text}: {s}");
        }
    }
}
