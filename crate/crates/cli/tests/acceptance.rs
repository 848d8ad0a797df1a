//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Criteria 4–6 and 9 share one randomized corpus, built once.

use ptw_core::eval::states_of;
use ptw_core::fuzz::{run_park_suite, run_suite, FuzzConfig, ParkConfig, SuiteReport, Violation};
use ptw_core::parser::{parse_formula, parse_stmt};
use ptw_core::proofs::{
    backward_variant_check, variant_check, VariantCertificate,
};
use ptw_core::slp_rules::slp_run;
use ptw_core::statespace::{StateSet, StateSpace};
use ptw_core::syntax::{desugar, Domain, Notion, Stmt, TransformerKind, VarDecl};
use ptw_core::transformers::{annotate, Engine};
use ptw_core::triples;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

fn decl(name: &str, domain: Domain) -> VarDecl {
    VarDecl { name: name.to_string(), domain }
}

fn space(decls: &[VarDecl]) -> StateSpace {
    StateSpace::enumerate(decls, 1 << 20).unwrap()
}

fn parity_setup() -> (StateSpace, Stmt) {
    let d = Domain::Int { lo: 0, hi: 31 };
    let decls = vec![decl("x", d), decl("y", d)];
    let sp = space(&decls);
    let prog = parse_stmt("if (x % 2 == 0) { y := y + 1 } else { y := 2 * y }").unwrap();
    (sp, prog)
}

fn cat_setup() -> (StateSpace, Stmt) {
    let decls = vec![
        decl("open", Domain::Bool),
        decl("spill", Domain::Bool),
        decl("dead", Domain::Bool),
    ];
    let sp = space(&decls);
    let prog = parse_stmt("while (!open) { dead := spill }; dead := spill").unwrap();
    let prog = desugar(&prog, &decls).unwrap();
    (sp, prog)
}

fn verdict_line(n: u32, name: &str, ok: bool, detail: &str) {
    if ok {
        println!("[acceptance] criterion {n} ({name}): PASS");
    } else {
        println!("[acceptance] criterion {n} ({name}): FAIL: {detail}");
    }
}

fn corpus() -> &'static (SuiteReport, Duration) {
    static CORPUS: OnceLock<(SuiteReport, Duration)> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let cfg = FuzzConfig {
            programs: 500,
            seed: 20_240_817,
            max_vars: 3,
            max_domain_size: 5,
            max_stmts: 12,
            max_loop_depth: 2,
            sets_per_program: 4,
            formulas_per_program: 2,
        };
        let start = Instant::now();
        (run_suite(&cfg), start.elapsed())
    })
}

fn violations_with_prefix<'a>(report: &'a SuiteReport, prefixes: &[&str]) -> Vec<&'a Violation> {
    report
        .violations
        .iter()
        .filter(|v| prefixes.iter().any(|p| v.check.starts_with(p)))
        .collect()
}

#[test]
fn criterion_1_branching_slp_golden() {
    let start = Instant::now();
    let (sp, prog) = parity_setup();
    let pre = parse_formula("y == 10").unwrap();
    let pre_set = states_of(&pre, &sp);

    let mut engine = Engine::new(&sp);
    let semantic = engine.slp(&prog, &pre_set);
    let run = slp_run(&prog, &pre, &sp, false);
    let syntactic = states_of(&run.formula, &sp);

    let expected_formula =
        parse_formula("(x % 2 == 1 || y == 11) && (x % 2 == 0 || y % 2 == 1 || y == 20)").unwrap();
    let expected = states_of(&expected_formula, &sp);

    let engines_agree = semantic == syntactic;
    let semantic_matches = semantic == expected;

    let expected_annotations = [
        ("pre", "y == 10"),
        ("then entry", "x % 2 == 1 || y == 10"),
        ("then exit", "x % 2 == 1 || y == 11"),
        ("else entry", "x % 2 == 0 || y == 10"),
        ("else exit", "x % 2 == 0 || y % 2 == 1 || y == 20"),
        ("post", "(x % 2 == 1 || y == 11) && (x % 2 == 0 || y % 2 == 1 || y == 20)"),
    ];
    let (points, annotate_ok) = annotate(&sp, &prog, &pre, TransformerKind::Slp);
    assert!(annotate_ok, "annotation extensions must match their formulas");
    assert_eq!(points.len(), expected_annotations.len());
    let mut annotation_mismatches = Vec::new();
    for (point, (label, text)) in points.iter().zip(&expected_annotations) {
        assert_eq!(point.label, *label);
        let want = states_of(&parse_formula(text).unwrap(), &sp);
        if point.set != want {
            annotation_mismatches.push(format!(
                "{label}: {} vs expected {} states",
                point.set.count(),
                want.count()
            ));
        }
    }

    let elapsed = start.elapsed();
    let in_time = elapsed < Duration::from_secs(1);

    let ok = engines_agree && semantic_matches && annotation_mismatches.is_empty() && in_time;
    let diff = expected.minus(&semantic);
    let example = diff
        .first()
        .map(|i| sp.describe(&sp.state_at(i)))
        .unwrap_or_default();
    verdict_line(
        1,
        "branching slp golden",
        ok,
        &format!(
            "both engines compute {} states (mutually exact, engines agree: {engines_agree}), \
             but the expected formula denotes {} states; the {} differing states (e.g. {example}) \
             have a second doubling predecessor under the wrapped domain (2*26 = 52 = 20 mod 32), \
             which unbounded-integer arithmetic does not see; annotation mismatches: {:?}; \
             elapsed {elapsed:.2?}",
            semantic.count(),
            expected.count(),
            diff.count(),
            annotation_mismatches,
        ),
    );
    assert!(engines_agree, "the two slp engines must agree");
    assert!(in_time, "golden run took {elapsed:.2?}");
    assert!(
        semantic_matches,
        "slp extension: got {} states, expected {} (diff {}, e.g. {})",
        semantic.count(),
        expected.count(),
        diff.count(),
        example,
    );
    assert!(annotation_mismatches.is_empty(), "{annotation_mismatches:?}");
}

#[test]
fn criterion_2_branching_verdicts() {
    let (sp, prog) = parity_setup();
    let mut engine = Engine::new(&sp);
    let pre = parse_formula("y == 10").unwrap();
    let post = parse_formula("y == 11").unwrap();

    let partial = triples::check(&mut engine, &pre, &prog, &post, Notion::PartialIncorrectness);
    let total = triples::check(&mut engine, &pre, &prog, &post, Notion::TotalIncorrectness);

    let witness_ok = match &total.witness {
        Some(state) => state.get(0) % 2 == 1 && state.get(1) == 11 && state.0 == vec![1, 11],
        None => false,
    };
    let ok = partial.valid && !total.valid && witness_ok;
    verdict_line(
        2,
        "branching verdicts",
        ok,
        &format!(
            "partial={} total={} witness={:?}",
            partial.valid, total.valid, total.witness
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_3_cat_golden() {
    let start = Instant::now();
    let (sp, prog) = cat_setup();
    let mut engine = Engine::new(&sp);
    let pre = parse_formula("open").unwrap();
    let post = parse_formula("true").unwrap();

    let partial = triples::check(&mut engine, &pre, &prog, &post, Notion::PartialIncorrectness);
    let total = triples::check(&mut engine, &pre, &prog, &post, Notion::TotalIncorrectness);
    let elapsed = start.elapsed();

    let ok = partial.valid && !total.valid && elapsed < Duration::from_secs(1);
    verdict_line(
        3,
        "cat golden",
        ok,
        &format!("partial={} total={} elapsed={elapsed:.2?}", partial.valid, total.valid),
    );
    assert!(ok);
}

#[test]
fn criterion_4_oracle_equivalence() {
    let (report, elapsed) = corpus();
    let bad = violations_with_prefix(
        report,
        &["oracle ", "slp routes", "slp_formula extension", "slp_formula carried set"],
    );
    let ok = report.programs >= 500 && bad.is_empty() && *elapsed < Duration::from_secs(60);
    verdict_line(
        4,
        "oracle equivalence",
        ok,
        &format!(
            "{} programs, {} violations, elapsed {elapsed:.2?}: {:?}",
            report.programs,
            bad.len(),
            bad.first()
        ),
    );
    assert!(report.programs >= 500);
    assert!(*elapsed < Duration::from_secs(60), "fuzz took {elapsed:.2?}");
    assert!(bad.is_empty(), "{:#?}", bad);
}

#[test]
fn criterion_5_duality_and_adjunction() {
    let (report, _) = corpus();
    let bad = violations_with_prefix(report, &["duality ", "adjunction "]);
    verdict_line(
        5,
        "duality and adjunction",
        bad.is_empty(),
        &format!("{} violations: {:?}", bad.len(), bad.first()),
    );
    assert!(bad.is_empty(), "{:#?}", bad);
}

#[test]
fn criterion_6_decomposition_soundness() {
    let (report, _) = corpus();
    let bad = violations_with_prefix(report, &["decompose ", "total implies partial"]);
    // The incorrectness-family `total => partial` direction is checked on
    // reversible programs (where it is a theorem); make sure that check
    // was actually exercised.
    let ok = bad.is_empty() && report.reversible_programs > 50;
    verdict_line(
        6,
        "decomposition soundness",
        ok,
        &format!(
            "{} violations ({} reversible programs exercised): {:?}",
            bad.len(),
            report.reversible_programs,
            bad.first()
        ),
    );
    assert!(report.reversible_programs > 50);
    assert!(bad.is_empty(), "{:#?}", bad);
}

#[test]
fn criterion_7_park_induction() {
    let cfg = ParkConfig {
        seed: 77,
        loops: 100,
        invariants_per_loop: 20,
        max_vars: 3,
        max_domain_size: 5,
    };
    let start = Instant::now();
    let report = run_park_suite(&cfg);
    let elapsed = start.elapsed();
    let ok = report.ok() && report.loops == 100 && report.premise_passes > 0;
    verdict_line(
        7,
        "park induction",
        ok,
        &format!(
            "{} loops, {} certificates, {} premise-passing, {} violations, elapsed {elapsed:.2?}",
            report.loops,
            report.certificates,
            report.premise_passes,
            report.violations.len()
        ),
    );
    assert!(report.premise_passes > 0);
    assert!(report.ok(), "{:#?}", report.violations);
}

#[test]
fn criterion_8_variant_rules() {
    let decls = vec![decl("x", Domain::Int { lo: 0, hi: 4 })];
    let sp = space(&decls);
    let mut engine = Engine::new(&sp);

    // Positive termination certificate.
    let down = VariantCertificate {
        loop_program: parse_stmt("while (x > 0) { x := x - 1 }").unwrap(),
        variant: ptw_core::parser::parse_expr("x").unwrap(),
    };
    let down_result = variant_check(&mut engine, &down).unwrap();
    let down_ok = down_result.all_hold && down_result.termination_verified;

    // Negative termination certificate: identity body.
    let spin = VariantCertificate {
        loop_program: parse_stmt("while (true) { x := x }").unwrap(),
        variant: ptw_core::parser::parse_expr("x").unwrap(),
    };
    let spin_result = variant_check(&mut engine, &spin).unwrap();
    let spin_ok = !spin_result.all_hold
        && !spin_result.per_value.is_empty()
        && spin_result.per_value.iter().all(|c| !c.holds && c.witness.is_some())
        && !spin_result.termination_verified;

    // Positive backward variant.
    let up = VariantCertificate {
        loop_program: parse_stmt("while (x < 3) { x := x + 1 }").unwrap(),
        variant: ptw_core::parser::parse_expr("x").unwrap(),
    };
    let up_result = backward_variant_check(&mut engine, &up).unwrap();
    let up_passing: Vec<i64> = up_result
        .per_value
        .iter()
        .filter(|c| c.holds)
        .map(|c| c.value)
        .collect();
    let up_ok = up_result.accepted && up_passing == vec![1, 2, 3] && up_result.witnesses_verified;

    // Negative backward variant: diverging body reaches nothing.
    let stuck = VariantCertificate {
        loop_program: parse_stmt("while (x < 3) { diverge }").unwrap(),
        variant: ptw_core::parser::parse_expr("x").unwrap(),
    };
    let stuck_result = backward_variant_check(&mut engine, &stuck).unwrap();
    let stuck_ok = !stuck_result.accepted
        && stuck_result.per_value.iter().all(|c| !c.holds && c.witness.is_some())
        && stuck_result.witnesses_verified;

    let ok = down_ok && spin_ok && up_ok && stuck_ok;
    verdict_line(
        8,
        "variant rules",
        ok,
        &format!("down={down_ok} spin={spin_ok} up={up_ok} stuck={stuck_ok}"),
    );
    assert!(down_ok, "{down_result:?}");
    assert!(spin_ok, "{spin_result:?}");
    assert!(up_ok, "{up_result:?}");
    assert!(stuck_ok, "{stuck_result:?}");
}

#[test]
fn criterion_9_fixpoint_discipline() {
    // Randomized corpus side: every Kleene trace converged within bound
    // and every loop's characteristic maps satisfy mu <= nu.
    let (report, _) = corpus();
    let bad = violations_with_prefix(
        report,
        &["kleene discipline", "mu below nu", "wp below wlp", "slp_formula kleene"],
    );

    // Golden side: the loops from criteria 1-8, traced explicitly.
    let mut golden_ok = true;
    let mut max_iterations = 0;
    for (decls, text, post) in [
        (
            vec![decl("x", Domain::Int { lo: 0, hi: 4 })],
            "while (x > 0) { x := x - 1 }",
            "x == 0",
        ),
        (
            vec![decl("x", Domain::Int { lo: 0, hi: 4 })],
            "while (x < 3) { x := x + 1 }",
            "x == 3",
        ),
        (
            vec![decl("x", Domain::Int { lo: 0, hi: 4 })],
            "while (true) { x := x }",
            "false",
        ),
        (
            vec![decl("open", Domain::Bool), decl("spill", Domain::Bool), decl("dead", Domain::Bool)],
            "while (!open) { dead := spill }",
            "dead == spill",
        ),
    ] {
        let sp = space(&decls);
        let prog = parse_stmt(text).unwrap();
        let post = states_of(&parse_formula(post).unwrap(), &sp);
        let mut engine = Engine::new(&sp);
        let wp = engine.wp(&prog, &post);
        let wlp = engine.wlp(&prog, &post);
        golden_ok &= wp.is_subset(&wlp);
        let slp = engine.slp(&prog, &post);
        let slp_direct = engine.slp_direct(&prog, &post);
        golden_ok &= slp == slp_direct;
        let _ = engine.sp(&prog, &StateSet::full(sp.size()));
        for trace in engine.take_traces() {
            max_iterations = max_iterations.max(trace.iterations);
            golden_ok &= trace.converged && trace.iterations <= sp.size() + 1;
        }
    }

    let ok = bad.is_empty() && golden_ok;
    verdict_line(
        9,
        "fixpoint discipline",
        ok,
        &format!(
            "{} corpus violations, golden loops ok: {golden_ok} \
             (max corpus iterations {}, max golden iterations {max_iterations})",
            bad.len(),
            report.max_fixpoint_iterations,
        ),
    );
    assert!(golden_ok);
    assert!(bad.is_empty(), "{:#?}", bad);
}
