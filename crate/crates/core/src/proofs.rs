//! Checkers for the three loop proof rules: Park induction for lower
//! bounds on greatest fixed points, termination variants, and backward
//! reachability variants.

use crate::eval::states_of;
use crate::statespace::{State, StateSet, StateSpace};
use crate::syntax::{Expr, Formula, Stmt};
use crate::transformers::Engine;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("certificate requires a single while loop")]
    NotALoop,
    #[error("variant is negative at state {state}: value {value}")]
    NegativeVariant { state: String, value: i128 },
}

/// The two transformers whose loop semantics are greatest fixed points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParkTransformer {
    Wlp,
    Slp,
}

impl ParkTransformer {
    pub fn name(self) -> &'static str {
        match self {
            ParkTransformer::Wlp => "wlp",
            ParkTransformer::Slp => "slp",
        }
    }
}

/// A Park induction certificate for one while loop: an invariant `I` and
/// the transformer argument (the postcondition for wlp, the precondition
/// for slp).
#[derive(Debug, Clone)]
pub struct ParkCertificate {
    pub loop_program: Stmt,
    pub transformer: ParkTransformer,
    pub invariant: Formula,
    pub argument: Formula,
}

#[derive(Debug, Clone)]
pub struct ParkResult {
    /// Whether `I` is below one application of the loop's characteristic
    /// map: `I ⊆ Φ(I)`.
    pub premise: bool,
    pub premise_witness: Option<State>,
    /// The engine-computed greatest fixed point `νΦ`, the bound the rule
    /// concludes `I` lies below.
    pub fixpoint: StateSet,
    /// `I ⊆ νΦ`, re-checked against the engine rather than assumed.
    pub conclusion_verified: bool,
    pub invariant_size: usize,
}

fn split_loop(program: &Stmt) -> Result<(&Formula, &Stmt), CertificateError> {
    match program {
        Stmt::While(guard, body) => Ok((guard, body)),
        _ => Err(CertificateError::NotALoop),
    }
}

/// Apply the loop's characteristic map once for the chosen transformer.
fn loop_step(
    engine: &mut Engine,
    transformer: ParkTransformer,
    guard_set: &StateSet,
    body: &Stmt,
    argument: &StateSet,
    x: &StateSet,
) -> StateSet {
    match transformer {
        // Φ(X) = (¬φ ∧ C) ∨ (φ ∧ wlp(body, X))
        ParkTransformer::Wlp => guard_set
            .complement()
            .intersect(argument)
            .union(&guard_set.intersect(&engine.wlp(body, x))),
        // Φ(Y) = F ∧ slp(body, ¬φ ∨ Y)
        ParkTransformer::Slp => {
            argument.intersect(&engine.slp(body, &guard_set.complement().union(x)))
        }
    }
}

/// Greatest fixed point of the loop's characteristic map, iterated from
/// the full space.
pub fn loop_gfp(
    engine: &mut Engine,
    transformer: ParkTransformer,
    guard_set: &StateSet,
    body: &Stmt,
    argument: &StateSet,
) -> StateSet {
    let size = engine.space().size();
    let mut current = StateSet::full(size);
    for _ in 0..=size + 1 {
        let next = loop_step(engine, transformer, guard_set, body, argument, &current);
        if next == current {
            return current;
        }
        current = next;
    }
    unreachable!("greatest fixed point failed to stabilize within |States|+1 steps")
}

/// Check a Park certificate: if `I ⊆ Φ(I)` then `I ⊆ νΦ`. The conclusion
/// is verified against the engine-computed fixed point in all cases.
pub fn park_check(engine: &mut Engine, cert: &ParkCertificate) -> Result<ParkResult, CertificateError> {
    let (guard, body) = split_loop(&cert.loop_program)?;
    let space = engine.space();
    let guard_set = states_of(guard, space);
    let invariant = states_of(&cert.invariant, space);
    let argument = states_of(&cert.argument, space);
    park_check_sets(engine, cert.transformer, &guard_set, body, &invariant, &argument)
}

/// Set-level Park check, shared with the randomized suites.
pub fn park_check_sets(
    engine: &mut Engine,
    transformer: ParkTransformer,
    guard_set: &StateSet,
    body: &Stmt,
    invariant: &StateSet,
    argument: &StateSet,
) -> Result<ParkResult, CertificateError> {
    let stepped = loop_step(engine, transformer, guard_set, body, argument, invariant);
    let premise_witness = invariant.minus(&stepped).first().map(|i| engine.space().state_at(i));
    let premise = premise_witness.is_none();
    let fixpoint = loop_gfp(engine, transformer, guard_set, body, argument);
    Ok(ParkResult {
        premise,
        premise_witness,
        conclusion_verified: invariant.is_subset(&fixpoint),
        invariant_size: invariant.count(),
        fixpoint,
    })
}

/// A termination or reachability variant certificate for one while loop.
#[derive(Debug, Clone)]
pub struct VariantCertificate {
    pub loop_program: Stmt,
    pub variant: Expr,
}

/// Verdict for one attained variant value.
#[derive(Debug, Clone)]
pub struct PerValueCheck {
    pub value: i64,
    pub holds: bool,
    pub witness: Option<State>,
}

#[derive(Debug, Clone)]
pub struct VariantResult {
    pub per_value: Vec<PerValueCheck>,
    /// All per-value triples hold (vacuously true when none are attained).
    pub all_hold: bool,
    /// Engine re-verification of the rule's conclusion,
    /// `wp(loop, true) = full`.
    pub termination_verified: bool,
    pub non_terminating_states: usize,
}

/// Values attained by the variant, checked nonnegative everywhere.
fn variant_values(
    space: &StateSpace,
    variant: &Expr,
) -> Result<Vec<(i64, StateSet)>, CertificateError> {
    let mut by_value: Vec<(i64, StateSet)> = Vec::new();
    for idx in 0..space.size() {
        let state = space.state_at(idx);
        let value = space.eval_expr(variant, &state);
        if value < 0 {
            return Err(CertificateError::NegativeVariant {
                state: space.describe(&state),
                value,
            });
        }
        let value = value as i64;
        match by_value.binary_search_by_key(&value, |(v, _)| *v) {
            Ok(pos) => by_value[pos].1.insert(idx),
            Err(pos) => {
                let mut set = StateSet::empty(space.size());
                set.insert(idx);
                by_value.insert(pos, (value, set));
            }
        }
    }
    Ok(by_value)
}

/// Termination variant rule: for every attained value `n`, the triple
/// `{φ ∧ v = n} body {v < n}` must be valid for total correctness; if all
/// hold the loop terminates universally, which is re-verified via the
/// engine.
pub fn variant_check(
    engine: &mut Engine,
    cert: &VariantCertificate,
) -> Result<VariantResult, CertificateError> {
    let (guard, body) = split_loop(&cert.loop_program)?;
    let space = engine.space();
    let guard_set = states_of(guard, space);
    let values = variant_values(space, &cert.variant)?;

    let mut below = StateSet::empty(space.size());
    let mut per_value = Vec::new();
    for (value, at_value) in &values {
        let lhs = guard_set.intersect(at_value);
        let wp_below = engine.wp(body, &below);
        let witness = lhs.minus(&wp_below).first().map(|i| space.state_at(i));
        per_value.push(PerValueCheck {
            value: *value,
            holds: witness.is_none(),
            witness,
        });
        below = below.union(at_value);
    }

    let all_hold = per_value.iter().all(|c| c.holds);
    let full = StateSet::full(space.size());
    let terminating = engine.wp(&cert.loop_program, &full);
    Ok(VariantResult {
        per_value,
        all_hold,
        termination_verified: terminating.is_full(),
        non_terminating_states: space.size() - terminating.count(),
    })
}

#[derive(Debug, Clone)]
pub struct BackwardVariantResult {
    pub per_value: Vec<PerValueCheck>,
    /// All attained values n ≥ 1 pass.
    pub all_hold: bool,
    /// The rule's conclusion is existential: some n >= 1 with a valid
    /// per-n triple. It holds vacuously when no n >= 1 is attained.
    pub accepted: bool,
    /// States with `¬φ ∧ v = n` for the passing values of n; the rule
    /// promises these are reachable by executing the loop.
    pub reachable_witness_set: StateSet,
    /// Engine re-verification that the witness set is inside
    /// `sp(loop, true)`.
    pub witnesses_verified: bool,
}

/// Backward variant rule: for attained `n ≥ 1`, the triple
/// `[v < n ∧ φ] body [v = n]` must be valid for incorrectness, i.e.
/// `{v = n} ⊆ sp(body, {v < n ∧ φ})`.
pub fn backward_variant_check(
    engine: &mut Engine,
    cert: &VariantCertificate,
) -> Result<BackwardVariantResult, CertificateError> {
    let (guard, body) = split_loop(&cert.loop_program)?;
    let space = engine.space();
    let guard_set = states_of(guard, space);
    let values = variant_values(space, &cert.variant)?;

    let mut below = StateSet::empty(space.size());
    let mut per_value = Vec::new();
    let mut witness_set = StateSet::empty(space.size());
    for (value, at_value) in &values {
        if *value >= 1 {
            let from = below.intersect(&guard_set);
            let reach = engine.sp(body, &from);
            let witness = at_value.minus(&reach).first().map(|i| space.state_at(i));
            let holds = witness.is_none();
            if holds {
                witness_set = witness_set.union(&guard_set.complement().intersect(at_value));
            }
            per_value.push(PerValueCheck { value: *value, holds, witness });
        }
        below = below.union(at_value);
    }

    let all_hold = per_value.iter().all(|c| c.holds);
    let accepted = per_value.is_empty() || per_value.iter().any(|c| c.holds);
    let full = StateSet::full(space.size());
    let reachable = engine.sp(&cert.loop_program, &full);
    Ok(BackwardVariantResult {
        all_hold,
        accepted,
        witnesses_verified: witness_set.is_subset(&reachable),
        reachable_witness_set: witness_set,
        per_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_stmt};
    use crate::statespace::StateSpace;
    use crate::syntax::{Domain, VarDecl};

    fn decl(name: &str, domain: Domain) -> VarDecl {
        VarDecl { name: name.to_string(), domain }
    }

    fn space(decls: &[VarDecl]) -> StateSpace {
        StateSpace::enumerate(decls, 1 << 20).unwrap()
    }

    fn countdown() -> (Vec<VarDecl>, Stmt) {
        let decls = vec![decl("x", Domain::Int { lo: 0, hi: 3 })];
        let prog = parse_stmt("while (x > 0) { x := x - 1 }").unwrap();
        (decls, prog)
    }

    #[test]
    fn park_with_true_invariant() {
        let (decls, prog) = countdown();
        let sp = space(&decls);
        let mut engine = Engine::new(&sp);
        let cert = ParkCertificate {
            loop_program: prog,
            transformer: ParkTransformer::Wlp,
            invariant: parse_formula("true").unwrap(),
            argument: parse_formula("x == 0").unwrap(),
        };
        let result = park_check(&mut engine, &cert).unwrap();
        // Φ(true) = (x <= 0 ∧ x = 0) ∨ (x > 0) = true over [0..3].
        assert!(result.premise);
        assert_eq!(result.fixpoint.count(), sp.size());
        assert!(result.conclusion_verified);
    }

    #[test]
    fn park_with_bottom_invariant_is_vacuous() {
        let (decls, prog) = countdown();
        let sp = space(&decls);
        let mut engine = Engine::new(&sp);
        let cert = ParkCertificate {
            loop_program: prog,
            transformer: ParkTransformer::Slp,
            invariant: parse_formula("false").unwrap(),
            argument: parse_formula("x == 0").unwrap(),
        };
        let result = park_check(&mut engine, &cert).unwrap();
        assert!(result.premise);
        assert!(result.conclusion_verified);
    }

    #[test]
    fn park_fixpoint_is_its_own_invariant() {
        let (decls, prog) = countdown();
        let sp = space(&decls);
        let mut engine = Engine::new(&sp);
        let (guard, body) = split_loop(&prog).unwrap();
        let guard_set = states_of(guard, &sp);
        for transformer in [ParkTransformer::Wlp, ParkTransformer::Slp] {
            let argument = states_of(&parse_formula("x == 0").unwrap(), &sp);
            let fixpoint = loop_gfp(&mut engine, transformer, &guard_set, body, &argument);
            let result =
                park_check_sets(&mut engine, transformer, &guard_set, body, &fixpoint, &argument)
                    .unwrap();
            assert!(result.premise, "{}", transformer.name());
            assert!(result.conclusion_verified);
        }
    }

    #[test]
    fn park_rejects_non_loop() {
        let sp = space(&[decl("x", Domain::Bool)]);
        let mut engine = Engine::new(&sp);
        let cert = ParkCertificate {
            loop_program: Stmt::Diverge,
            transformer: ParkTransformer::Wlp,
            invariant: parse_formula("true").unwrap(),
            argument: parse_formula("true").unwrap(),
        };
        assert_eq!(park_check(&mut engine, &cert).unwrap_err(), CertificateError::NotALoop);
    }

    #[test]
    fn countdown_variant_proves_termination() {
        let (decls, prog) = countdown();
        let sp = space(&decls);
        let mut engine = Engine::new(&sp);
        let cert = VariantCertificate {
            loop_program: prog,
            variant: crate::parser::parse_expr("x").unwrap(),
        };
        let result = variant_check(&mut engine, &cert).unwrap();
        assert!(result.all_hold);
        assert!(result.termination_verified);
        assert_eq!(result.non_terminating_states, 0);
    }

    #[test]
    fn identity_body_variant_fails_everywhere() {
        let decls = vec![decl("x", Domain::Int { lo: 0, hi: 3 })];
        let sp = space(&decls);
        let prog = parse_stmt("while (true) { x := x }").unwrap();
        let mut engine = Engine::new(&sp);
        let cert = VariantCertificate {
            loop_program: prog,
            variant: crate::parser::parse_expr("x").unwrap(),
        };
        let result = variant_check(&mut engine, &cert).unwrap();
        assert!(!result.all_hold);
        assert!(result.per_value.iter().all(|c| !c.holds));
        assert!(!result.termination_verified);
        assert_eq!(result.non_terminating_states, sp.size());
    }

    #[test]
    fn cat_loop_has_no_variant() {
        let decls = vec![
            decl("open", Domain::Bool),
            decl("spill", Domain::Bool),
            decl("dead", Domain::Bool),
        ];
        let sp = space(&decls);
        let prog = parse_stmt("while (!open) { dead := spill }").unwrap();
        let mut engine = Engine::new(&sp);
        for variant in ["dead + spill", "open + dead", "spill"] {
            let cert = VariantCertificate {
                loop_program: prog.clone(),
                variant: crate::parser::parse_expr(variant).unwrap(),
            };
            let result = variant_check(&mut engine, &cert).unwrap();
            assert!(!result.all_hold, "variant {variant} cannot decrease forever");
            assert!(!result.termination_verified);
        }
    }

    #[test]
    fn negative_variant_rejected() {
        let (decls, prog) = countdown();
        let sp = space(&decls);
        let mut engine = Engine::new(&sp);
        let cert = VariantCertificate {
            loop_program: prog,
            variant: crate::parser::parse_expr("x - 1").unwrap(),
        };
        assert!(matches!(
            variant_check(&mut engine, &cert),
            Err(CertificateError::NegativeVariant { .. })
        ));
    }

    #[test]
    fn counting_loop_backward_variant() {
        let decls = vec![decl("x", Domain::Int { lo: 0, hi: 4 })];
        let sp = space(&decls);
        let prog = parse_stmt("while (x < 3) { x := x + 1 }").unwrap();
        let mut engine = Engine::new(&sp);
        let cert = VariantCertificate {
            loop_program: prog,
            variant: crate::parser::parse_expr("x").unwrap(),
        };
        let result = backward_variant_check(&mut engine, &cert).unwrap();
        let holds: Vec<(i64, bool)> = result.per_value.iter().map(|c| (c.value, c.holds)).collect();
        // From {v < n ∧ x < 3} one iteration reaches {x = n} for n = 1..3;
        // x = 4 has no in-guard predecessor.
        assert_eq!(holds, vec![(1, true), (2, true), (3, true), (4, false)]);
        assert!(!result.all_hold);
        assert!(result.accepted);
        assert!(result.witnesses_verified);
        // The guaranteed-reachable block is ¬φ ∧ v = 3.
        let expect = states_of(&parse_formula("x == 3").unwrap(), &sp);
        assert_eq!(result.reachable_witness_set, expect);
    }

    #[test]
    fn diverging_body_fails_backward_variant() {
        let decls = vec![decl("x", Domain::Int { lo: 0, hi: 4 })];
        let sp = space(&decls);
        let prog = parse_stmt("while (x < 3) { diverge }").unwrap();
        let mut engine = Engine::new(&sp);
        let cert = VariantCertificate {
            loop_program: prog,
            variant: crate::parser::parse_expr("x").unwrap(),
        };
        let result = backward_variant_check(&mut engine, &cert).unwrap();
        assert!(result.per_value.iter().all(|c| !c.holds));
        assert!(!result.accepted);
        assert!(result.reachable_witness_set.is_empty());
    }

    #[test]
    fn constant_variant_is_vacuous() {
        let decls = vec![decl("x", Domain::Int { lo: 0, hi: 4 })];
        let sp = space(&decls);
        let prog = parse_stmt("while (x < 3) { x := x + 1 }").unwrap();
        let mut engine = Engine::new(&sp);
        let cert = VariantCertificate {
            loop_program: prog,
            variant: crate::parser::parse_expr("0").unwrap(),
        };
        let result = backward_variant_check(&mut engine, &cert).unwrap();
        assert!(result.per_value.is_empty());
        assert!(result.accepted);
        assert!(result.reachable_witness_set.is_empty());
        assert!(result.witnesses_verified);
    }
}
