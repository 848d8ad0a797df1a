//! Validity of correctness and incorrectness triples, and the two
//! decomposition theorems (total = partial + termination, and total
//! incorrectness = partial incorrectness + reachability).

use crate::eval::states_of;
use crate::statespace::{State, StateSet, StateSpace};
use crate::syntax::{Formula, Notion, Stmt};
use crate::transformers::Engine;

/// Outcome of one subset test, with a deterministic counterexample when it
/// fails: the lowest-index state in the difference.
#[derive(Debug, Clone)]
pub struct SubsetCheck {
    pub holds: bool,
    pub witness: Option<State>,
    pub lhs_size: usize,
    pub rhs_size: usize,
}

pub fn subset_check(space: &StateSpace, lhs: &StateSet, rhs: &StateSet) -> SubsetCheck {
    let witness = lhs.minus(rhs).first().map(|idx| space.state_at(idx));
    SubsetCheck {
        holds: witness.is_none(),
        witness,
        lhs_size: lhs.count(),
        rhs_size: rhs.count(),
    }
}

/// Verdict for one triple under one validity notion.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub notion: Notion,
    pub valid: bool,
    pub witness: Option<State>,
    pub lhs_size: usize,
    pub rhs_size: usize,
}

/// Decide a triple: correctness compares the precondition against the
/// weakest (liberal) precondition, incorrectness compares the
/// postcondition against the strongest (liberal) postcondition.
pub fn check(engine: &mut Engine, pre: &Formula, program: &Stmt, post: &Formula, notion: Notion) -> Verdict {
    let space = engine.space();
    let pre_set = states_of(pre, space);
    let post_set = states_of(post, space);
    check_sets(engine, &pre_set, program, &post_set, notion)
}

pub fn check_triple(engine: &mut Engine, triple: &crate::syntax::Triple) -> Verdict {
    check(engine, &triple.pre, &triple.program, &triple.post, triple.notion)
}

/// As [`check`], over extensions directly.
pub fn check_sets(
    engine: &mut Engine,
    pre: &StateSet,
    program: &Stmt,
    post: &StateSet,
    notion: Notion,
) -> Verdict {
    let (lhs, rhs) = match notion {
        Notion::TotalCorrectness => (pre.clone(), engine.wp(program, post)),
        Notion::PartialCorrectness => (pre.clone(), engine.wlp(program, post)),
        Notion::TotalIncorrectness => (post.clone(), engine.sp(program, pre)),
        Notion::PartialIncorrectness => (post.clone(), engine.slp(program, pre)),
    };
    let check = subset_check(engine.space(), &lhs, &rhs);
    Verdict {
        notion,
        valid: check.holds,
        witness: check.witness,
        lhs_size: check.lhs_size,
        rhs_size: check.rhs_size,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionKind {
    Correctness,
    Incorrectness,
}

/// The decomposition of a total notion into its partial notion plus a side
/// condition (termination or reachability). The implication
/// `partial && side => total` is re-checked against the directly computed
/// total verdict, never assumed.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub kind: DecompositionKind,
    pub partial: SubsetCheck,
    pub side: SubsetCheck,
    pub implied_total: bool,
    pub direct_total: SubsetCheck,
    pub sound: bool,
}

/// `b ⊆ wp(p, c)  ⟸  b ⊆ wlp(p, c)  ∧  b ⊆ wp(p, true)`.
pub fn decompose_correctness(
    engine: &mut Engine,
    pre: &StateSet,
    program: &Stmt,
    post: &StateSet,
) -> Decomposition {
    let space = engine.space();
    let full = StateSet::full(space.size());
    let partial = subset_check(space, pre, &engine.wlp(program, post));
    let side = subset_check(space, pre, &engine.wp(program, &full));
    let direct_total = subset_check(space, pre, &engine.wp(program, post));
    let implied_total = partial.holds && side.holds;
    let sound = !implied_total || direct_total.holds;
    Decomposition {
        kind: DecompositionKind::Correctness,
        partial,
        side,
        implied_total,
        direct_total,
        sound,
    }
}

/// `c ⊆ sp(p, b)  ⟸  c ⊆ slp(p, b)  ∧  c ⊆ sp(p, true)`.
pub fn decompose_incorrectness(
    engine: &mut Engine,
    pre: &StateSet,
    program: &Stmt,
    post: &StateSet,
) -> Decomposition {
    let space = engine.space();
    let full = StateSet::full(space.size());
    let partial = subset_check(space, post, &engine.slp(program, pre));
    let side = subset_check(space, post, &engine.sp(program, &full));
    let direct_total = subset_check(space, post, &engine.sp(program, pre));
    let implied_total = partial.holds && side.holds;
    let sound = !implied_total || direct_total.holds;
    Decomposition {
        kind: DecompositionKind::Incorrectness,
        partial,
        side,
        implied_total,
        direct_total,
        sound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_stmt};
    use crate::syntax::{desugar, Domain, VarDecl};

    fn decl(name: &str, domain: Domain) -> VarDecl {
        VarDecl { name: name.to_string(), domain }
    }

    fn space(decls: &[VarDecl]) -> StateSpace {
        StateSpace::enumerate(decls, 1 << 20).unwrap()
    }

    fn branching_setup() -> (Vec<VarDecl>, Stmt) {
        let d = Domain::Int { lo: 0, hi: 31 };
        let decls = vec![decl("x", d), decl("y", d)];
        let prog = parse_stmt("if (x % 2 == 0) { y := y + 1 } else { y := 2 * y }").unwrap();
        (decls, prog)
    }

    #[test]
    fn branching_example_is_partially_incorrect_only() {
        let (decls, prog) = branching_setup();
        let sp = space(&decls);
        let mut engine = Engine::new(&sp);
        let pre = parse_formula("y == 10").unwrap();
        let post = parse_formula("y == 11").unwrap();

        let partial = check(&mut engine, &pre, &prog, &post, Notion::PartialIncorrectness);
        assert!(partial.valid);
        assert!(partial.witness.is_none());

        let total = check(&mut engine, &pre, &prog, &post, Notion::TotalIncorrectness);
        assert!(!total.valid);
        // Deterministic witness: lowest enumeration index in the
        // difference, which is the x = 1, y = 11 state.
        assert_eq!(total.witness, Some(State(vec![1, 11])));
    }

    #[test]
    fn check_triple_matches_componentwise_check() {
        let (decls, prog) = branching_setup();
        let sp = space(&decls);
        let mut engine = Engine::new(&sp);
        let triple = crate::syntax::Triple {
            pre: parse_formula("y == 10").unwrap(),
            program: prog.clone(),
            post: parse_formula("y == 11").unwrap(),
            notion: Notion::TotalIncorrectness,
        };
        let via_triple = check_triple(&mut engine, &triple);
        let direct = check(&mut engine, &triple.pre, &prog, &triple.post, triple.notion);
        assert_eq!(via_triple.valid, direct.valid);
        assert_eq!(via_triple.witness, direct.witness);
    }

    #[test]
    fn invalid_witness_agrees_with_the_oracle() {
        let (decls, prog) = branching_setup();
        let sp = space(&decls);
        let mut engine = Engine::new(&sp);
        let pre = parse_formula("y == 10").unwrap();
        let post = parse_formula("y == 11").unwrap();
        let verdict = check(&mut engine, &pre, &prog, &post, Notion::TotalIncorrectness);
        let witness = verdict.witness.expect("invalid verdicts carry a witness");

        let map = crate::oracle::relation(&prog, &sp);
        let pre_set = states_of(&pre, &sp);
        let post_set = states_of(&post, &sp);
        let reference = crate::oracle::ref_sp(&map, &pre_set);
        let idx = sp.index_of(&witness);
        assert!(post_set.contains(idx));
        assert!(!reference.contains(idx));
    }

    #[test]
    fn cat_program_verdicts() {
        let decls = vec![
            decl("open", Domain::Bool),
            decl("spill", Domain::Bool),
            decl("dead", Domain::Bool),
        ];
        let sp = space(&decls);
        let prog = parse_stmt("while (!open) { dead := spill }; dead := spill").unwrap();
        let prog = desugar(&prog, &decls).unwrap();
        let mut engine = Engine::new(&sp);
        let pre = parse_formula("open").unwrap();
        let post = parse_formula("true").unwrap();

        let partial = check(&mut engine, &pre, &prog, &post, Notion::PartialIncorrectness);
        assert!(partial.valid);
        let total = check(&mut engine, &pre, &prog, &post, Notion::TotalIncorrectness);
        assert!(!total.valid);
        assert_eq!(total.witness, Some(State(vec![0, 0, 0])));
    }

    #[test]
    fn decompose_correctness_countdown() {
        let decls = vec![decl("x", Domain::Int { lo: 0, hi: 3 })];
        let sp = space(&decls);
        let prog = parse_stmt("while (x > 0) { x := x - 1 }").unwrap();
        let mut engine = Engine::new(&sp);
        let full = StateSet::full(sp.size());
        let post = states_of(&parse_formula("x == 0").unwrap(), &sp);
        let d = decompose_correctness(&mut engine, &full, &prog, &post);
        assert!(d.partial.holds);
        assert!(d.side.holds);
        assert!(d.implied_total);
        assert!(d.direct_total.holds);
        assert!(d.sound);
    }

    #[test]
    fn decompose_correctness_diverge_fails_termination() {
        let decls = vec![decl("x", Domain::Bool)];
        let sp = space(&decls);
        let mut engine = Engine::new(&sp);
        let full = StateSet::full(sp.size());
        let empty = StateSet::empty(sp.size());
        let d = decompose_correctness(&mut engine, &full, &Stmt::Diverge, &empty);
        assert!(d.partial.holds);
        assert!(!d.side.holds);
        assert!(!d.implied_total);
        assert!(!d.direct_total.holds);
        assert!(d.sound);
    }

    #[test]
    fn decompose_correctness_cat_from_open_states() {
        let decls = vec![
            decl("open", Domain::Bool),
            decl("spill", Domain::Bool),
            decl("dead", Domain::Bool),
        ];
        let sp = space(&decls);
        let prog = parse_stmt("while (!open) { dead := spill }; dead := spill").unwrap();
        let prog = desugar(&prog, &decls).unwrap();
        let mut engine = Engine::new(&sp);
        let pre = states_of(&parse_formula("open").unwrap(), &sp);
        let post = states_of(&parse_formula("dead == spill").unwrap(), &sp);
        let d = decompose_correctness(&mut engine, &pre, &prog, &post);
        // Termination holds from the states of interest even though the
        // loop diverges elsewhere.
        assert!(d.partial.holds && d.side.holds && d.direct_total.holds && d.sound);
    }

    #[test]
    fn decompose_incorrectness_branching_example() {
        let (decls, prog) = branching_setup();
        let sp = space(&decls);
        let mut engine = Engine::new(&sp);
        let pre = states_of(&parse_formula("y == 10").unwrap(), &sp);
        let post = states_of(&parse_formula("y == 11").unwrap(), &sp);
        let d = decompose_incorrectness(&mut engine, &pre, &prog, &post);
        assert!(d.partial.holds);
        assert!(!d.side.holds, "odd-x y=11 states are unreachable");
        assert!(!d.implied_total);
        assert!(!d.direct_total.holds);
        assert!(d.sound);
    }

    #[test]
    fn decompose_incorrectness_restricted_post_is_total() {
        let (decls, prog) = branching_setup();
        let sp = space(&decls);
        let mut engine = Engine::new(&sp);
        let pre = states_of(&parse_formula("y == 10 && x % 2 == 0").unwrap(), &sp);
        let post = states_of(&parse_formula("x % 2 == 0 && y == 11").unwrap(), &sp);
        let d = decompose_incorrectness(&mut engine, &pre, &prog, &post);
        assert!(d.partial.holds && d.side.holds && d.implied_total && d.direct_total.holds);
    }

    #[test]
    fn decompose_incorrectness_empty_post_is_vacuous() {
        let (decls, prog) = branching_setup();
        let sp = space(&decls);
        let mut engine = Engine::new(&sp);
        let pre = states_of(&parse_formula("y == 10").unwrap(), &sp);
        let post = StateSet::empty(sp.size());
        let d = decompose_incorrectness(&mut engine, &pre, &prog, &post);
        assert!(d.partial.holds && d.side.holds && d.implied_total && d.direct_total.holds);
    }
}
