//! Randomized cross-validation: generates small programs, runs every
//! transformer through the semantic engine, the syntactic slp engine and
//! the operational oracle, and checks the algebraic laws connecting them.
//!
//! Violations are collected rather than panicking so the CLI can report
//! them; an empty violation list is the pass condition.

use crate::eval::states_of;
use crate::oracle;
use crate::proofs::{loop_gfp, park_check_sets, ParkTransformer};
use crate::slp_rules;
use crate::statespace::{StateSet, StateSpace};
use crate::syntax::{
    desugar, BinOp, CmpOp, Domain, Expr, Formula, Quantifier, Stmt, VarDecl,
};
use crate::transformers::Engine;
use crate::triples::{decompose_correctness, decompose_incorrectness};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub seed: u64,
    pub programs: usize,
    pub max_vars: usize,
    pub max_domain_size: u64,
    pub max_stmts: usize,
    pub max_loop_depth: usize,
    pub sets_per_program: usize,
    pub formulas_per_program: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 0,
            programs: 500,
            max_vars: 3,
            max_domain_size: 5,
            max_stmts: 12,
            max_loop_depth: 2,
            sets_per_program: 4,
            formulas_per_program: 2,
        }
    }
}

/// One failed check, with enough context to reproduce it.
#[derive(Debug, Clone)]
pub struct Violation {
    pub check: String,
    pub program: String,
    pub decls: String,
    pub detail: String,
}

#[derive(Debug, Default)]
pub struct SuiteReport {
    pub programs: usize,
    /// Programs whose terminating relation is injective. Only these can
    /// support the `total ⟹ partial` direction for incorrectness: a
    /// non-injective step makes a state reachable from outside any given
    /// precondition, so `sp ⊆ slp` fails.
    pub reversible_programs: usize,
    pub checks: u64,
    pub violations: Vec<Violation>,
    pub loops_checked: u64,
    pub max_fixpoint_iterations: usize,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

// ----------------------------------------------------------------------
// Generators
// ----------------------------------------------------------------------

pub fn gen_decls(rng: &mut impl Rng, cfg: &FuzzConfig) -> Vec<VarDecl> {
    let names = ["x", "y", "z", "w"];
    let count = rng.gen_range(1..=cfg.max_vars.min(names.len()));
    (0..count)
        .map(|i| {
            let domain = if rng.gen_bool(0.3) {
                Domain::Bool
            } else {
                let lo = rng.gen_range(-2..=2);
                let size = rng.gen_range(2..=cfg.max_domain_size) as i64;
                Domain::Int { lo, hi: lo + size - 1 }
            };
            VarDecl { name: names[i].to_string(), domain }
        })
        .collect()
}

pub fn gen_expr(rng: &mut impl Rng, decls: &[VarDecl], depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.45) {
        if !decls.is_empty() && rng.gen_bool(0.6) {
            let d = &decls[rng.gen_range(0..decls.len())];
            Expr::Var(d.name.clone())
        } else {
            Expr::Const(rng.gen_range(-3..=6))
        }
    } else {
        let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Mod]
            .choose(rng)
            .unwrap();
        Expr::bin(
            op,
            gen_expr(rng, decls, depth - 1),
            gen_expr(rng, decls, depth - 1),
        )
    }
}

fn gen_cmp(rng: &mut impl Rng, decls: &[VarDecl]) -> Formula {
    let op = *[CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge]
        .choose(rng)
        .unwrap();
    Formula::Cmp(op, gen_expr(rng, decls, 1), gen_expr(rng, decls, 1))
}

/// Quantifier-free formula, suitable as a guard.
pub fn gen_guard(rng: &mut impl Rng, decls: &[VarDecl], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.5) {
        let bools: Vec<&VarDecl> = decls.iter().filter(|d| d.domain == Domain::Bool).collect();
        if !bools.is_empty() && rng.gen_bool(0.4) {
            Formula::Var(bools[rng.gen_range(0..bools.len())].name.clone())
        } else {
            gen_cmp(rng, decls)
        }
    } else {
        match rng.gen_range(0..4) {
            0 => Formula::and(gen_guard(rng, decls, depth - 1), gen_guard(rng, decls, depth - 1)),
            1 => Formula::or(gen_guard(rng, decls, depth - 1), gen_guard(rng, decls, depth - 1)),
            2 => Formula::not(gen_guard(rng, decls, depth - 1)),
            _ => Formula::implies(
                gen_guard(rng, decls, depth - 1),
                gen_guard(rng, decls, depth - 1),
            ),
        }
    }
}

/// Formula that may carry a bounded quantifier.
pub fn gen_formula(rng: &mut impl Rng, decls: &[VarDecl], depth: usize) -> Formula {
    if rng.gen_bool(0.25) {
        let q = if rng.gen_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists };
        let lo = rng.gen_range(-2..=2);
        let hi = lo + rng.gen_range(0..=4);
        let mut inner = decls.to_vec();
        inner.push(VarDecl { name: "q".to_string(), domain: Domain::Int { lo, hi } });
        Formula::Quant {
            q,
            var: "q".to_string(),
            lo,
            hi,
            body: Box::new(gen_guard(rng, &inner, depth)),
        }
    } else {
        gen_guard(rng, decls, depth)
    }
}

fn gen_stmt(rng: &mut impl Rng, decls: &[VarDecl], budget: &mut usize, loop_depth: usize, cfg: &FuzzConfig) -> Stmt {
    debug_assert!(*budget >= 1);
    if *budget == 1 {
        *budget = 0;
        let roll = rng.gen_range(0..10);
        return if roll < 7 {
            let d = &decls[rng.gen_range(0..decls.len())];
            Stmt::Assign(d.name.clone(), gen_expr(rng, decls, 2))
        } else if roll < 8 {
            Stmt::Diverge
        } else {
            Stmt::Skip
        };
    }
    match rng.gen_range(0..10) {
        0..=3 => {
            // Sequence: split the budget.
            let left = rng.gen_range(1..*budget);
            let mut left_budget = left;
            let mut right_budget = *budget - left;
            let first = gen_stmt(rng, decls, &mut left_budget, loop_depth, cfg);
            let second = gen_stmt(rng, decls, &mut right_budget, loop_depth, cfg);
            *budget = left_budget + right_budget;
            Stmt::seq(first, second)
        }
        4..=5 => {
            *budget -= 1;
            let d = &decls[rng.gen_range(0..decls.len())];
            Stmt::Assign(d.name.clone(), gen_expr(rng, decls, 2))
        }
        6..=7 => {
            *budget -= 1;
            let guard = gen_guard(rng, decls, 1);
            let mut t_budget = (*budget / 2).max(1);
            let mut e_budget = (*budget - *budget / 2).max(1);
            *budget = 0;
            let then_branch = gen_stmt(rng, decls, &mut t_budget, loop_depth, cfg);
            let else_branch = gen_stmt(rng, decls, &mut e_budget, loop_depth, cfg);
            *budget = t_budget + e_budget;
            Stmt::ite(guard, then_branch, else_branch)
        }
        8 if loop_depth < cfg.max_loop_depth => {
            *budget -= 1;
            let guard = gen_guard(rng, decls, 1);
            let mut body_budget = *budget;
            *budget = 0;
            let body = gen_stmt(rng, decls, &mut body_budget, loop_depth + 1, cfg);
            *budget = body_budget;
            Stmt::while_loop(guard, body)
        }
        _ => {
            *budget -= 1;
            if rng.gen_bool(0.5) {
                Stmt::Diverge
            } else {
                Stmt::Skip
            }
        }
    }
}

/// Random program over the given declarations; may contain `skip`.
pub fn gen_program(rng: &mut impl Rng, decls: &[VarDecl], cfg: &FuzzConfig) -> Stmt {
    let mut budget = rng.gen_range(1..=cfg.max_stmts);
    gen_stmt(rng, decls, &mut budget, 0, cfg)
}

pub fn gen_set(rng: &mut impl Rng, universe: usize) -> StateSet {
    let density = rng.gen_range(0.05..0.95);
    let mut set = StateSet::empty(universe);
    for i in 0..universe {
        if rng.gen_bool(density) {
            set.insert(i);
        }
    }
    set
}

fn collect_loops<'a>(stmt: &'a Stmt, out: &mut Vec<&'a Stmt>) {
    match stmt {
        Stmt::Diverge | Stmt::Skip | Stmt::Assign(..) => {}
        Stmt::Seq(first, second) => {
            collect_loops(first, out);
            collect_loops(second, out);
        }
        Stmt::Ite(_, then_branch, else_branch) => {
            collect_loops(then_branch, out);
            collect_loops(else_branch, out);
        }
        Stmt::While(_, body) => {
            out.push(stmt);
            collect_loops(body, out);
        }
    }
}

// ----------------------------------------------------------------------
// The oracle-equivalence suite
// ----------------------------------------------------------------------

struct Ctx<'a> {
    program_text: String,
    decls_text: String,
    report: &'a mut SuiteReport,
}

impl Ctx<'_> {
    fn check(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> String) {
        self.report.checks += 1;
        if !ok {
            self.report.violations.push(Violation {
                check: name.to_string(),
                program: self.program_text.clone(),
                decls: self.decls_text.clone(),
                detail: detail(),
            });
        }
    }
}

fn describe_decls(decls: &[VarDecl]) -> String {
    decls
        .iter()
        .map(|d| format!("var {} : {};", d.name, d.domain))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Run the full cross-validation suite.
pub fn run_suite(cfg: &FuzzConfig) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = SuiteReport::default();

    for _ in 0..cfg.programs {
        let decls = gen_decls(&mut rng, cfg);
        let space = StateSpace::enumerate(&decls, 1 << 20).expect("fuzz spaces are small");
        let program = gen_program(&mut rng, &decls, cfg);
        let program = desugar(&program, &decls).expect("declarations are nonempty");
        report.programs += 1;

        let mut ctx = Ctx {
            program_text: program.to_string(),
            decls_text: describe_decls(&decls),
            report: &mut report,
        };

        let map = oracle::relation(&program, &space);
        let reversible = {
            let mut hit = StateSet::empty(space.size());
            let mut injective = true;
            for initial in 0..space.size() {
                if let Some(final_idx) = map.get(initial) {
                    if hit.contains(final_idx) {
                        injective = false;
                        break;
                    }
                    hit.insert(final_idx);
                }
            }
            injective
        };
        if reversible {
            ctx.report.reversible_programs += 1;
        }
        let mut engine = Engine::new(&space);
        let full = StateSet::full(space.size());

        let sets: Vec<StateSet> = (0..cfg.sets_per_program)
            .map(|_| gen_set(&mut rng, space.size()))
            .collect();

        // Per-set transformer results, oracle-checked.
        struct Row {
            arg: StateSet,
            wp: StateSet,
            wlp: StateSet,
            sp: StateSet,
            slp: StateSet,
        }
        let mut rows: Vec<Row> = Vec::new();
        for arg in &sets {
            let wp = engine.wp(&program, arg);
            let wlp = engine.wlp(&program, arg);
            let sp = engine.sp(&program, arg);
            let slp = engine.slp(&program, arg);
            let slp_direct = engine.slp_direct(&program, arg);

            ctx.check("oracle wp", wp == oracle::ref_wp(&map, arg), || "wp != ref_wp".into());
            ctx.check("oracle wlp", wlp == oracle::ref_wlp(&map, arg), || "wlp != ref_wlp".into());
            ctx.check("oracle sp", sp == oracle::ref_sp(&map, arg), || "sp != ref_sp".into());
            ctx.check("oracle slp", slp == oracle::ref_slp(&map, arg), || "slp != ref_slp".into());
            ctx.check("slp routes", slp == slp_direct, || {
                "dual-of-sp route disagrees with direct liberal recursion".into()
            });

            // Dualities, with the direct route on the liberal side so the
            // two sides are computed independently.
            let sp_not = engine.sp(&program, &arg.complement());
            ctx.check("duality slp", slp_direct == sp_not.complement(), || {
                "slp(B) != !sp(!B)".into()
            });
            let wp_not = engine.wp(&program, &arg.complement());
            ctx.check("duality wlp", wlp == wp_not.complement(), || {
                "wlp(C) != !wp(!C)".into()
            });

            // mu <= nu for the backward characteristic map.
            ctx.check("wp below wlp", wp.is_subset(&wlp), || "wp(C) not below wlp(C)".into());

            rows.push(Row { arg: arg.clone(), wp, wlp, sp, slp });
        }

        // Adjunctions and decompositions over consecutive pairs.
        for i in 0..rows.len() {
            let b = &rows[i];
            let c = &rows[(i + 1) % rows.len()];
            ctx.check(
                "adjunction sp/wlp",
                b.sp.is_subset(&c.arg) == b.arg.is_subset(&c.wlp),
                || "sp(p,b) <= c iff b <= wlp(p,c) violated".into(),
            );
            ctx.check(
                "adjunction slp/wp",
                c.arg.is_subset(&b.slp) == c.wp.is_subset(&b.arg),
                || "c <= slp(p,b) iff wp(p,c) <= b violated".into(),
            );
        }

        let wp_true = engine.wp(&program, &full);
        let sp_true = engine.sp(&program, &full);
        for i in 0..rows.len() {
            let b = &rows[i].arg;
            let c = &rows[(i + 1) % rows.len()].arg;
            let d = decompose_correctness(&mut engine, b, &program, c);
            ctx.check("decompose correctness", d.sound, || {
                "partial + termination did not imply total correctness".into()
            });
            ctx.check(
                "decompose correctness side",
                d.side.holds == b.is_subset(&wp_true),
                || "termination conjunct disagrees with wp(p, true)".into(),
            );
            ctx.check(
                "total implies partial",
                !d.direct_total.holds || d.partial.holds,
                || "total correctness without partial correctness".into(),
            );
            let d = decompose_incorrectness(&mut engine, b, &program, c);
            ctx.check("decompose incorrectness", d.sound, || {
                "partial + reachability did not imply total incorrectness".into()
            });
            ctx.check(
                "decompose incorrectness side",
                d.side.holds == c.is_subset(&sp_true),
                || "reachability conjunct disagrees with sp(p, true)".into(),
            );
            if reversible {
                ctx.check(
                    "total implies partial incorrectness",
                    !d.direct_total.holds || d.partial.holds,
                    || "total incorrectness without partial incorrectness".into(),
                );
            }
        }

        // Monotonicity on one nested pair.
        if rows.len() >= 2 {
            let small = rows[0].arg.intersect(&rows[1].arg);
            let wp_small = engine.wp(&program, &small);
            let wlp_small = engine.wlp(&program, &small);
            let sp_small = engine.sp(&program, &small);
            let slp_small = engine.slp(&program, &small);
            ctx.check("monotone wp", wp_small.is_subset(&rows[0].wp), || "wp not monotone".into());
            ctx.check("monotone wlp", wlp_small.is_subset(&rows[0].wlp), || "wlp not monotone".into());
            ctx.check("monotone sp", sp_small.is_subset(&rows[0].sp), || "sp not monotone".into());
            ctx.check("monotone slp", slp_small.is_subset(&rows[0].slp), || "slp not monotone".into());
        }

        // Syntactic slp engine agreement.
        for _ in 0..cfg.formulas_per_program {
            let pre = gen_formula(&mut rng, &decls, 1);
            let run = slp_rules::slp_run(&program, &pre, &space, false);
            let pre_set = states_of(&pre, &space);
            let semantic = engine.slp(&program, &pre_set);
            ctx.check(
                "slp_formula extension",
                states_of(&run.formula, &space) == semantic,
                || format!("formula engine disagrees on pre {pre}"),
            );
            ctx.check("slp_formula carried set", run.set == semantic, || {
                format!("carried extension disagrees on pre {pre}")
            });
            for trace in &run.traces {
                ctx.check("slp_formula kleene", trace.converged && trace.iterations <= space.size() + 1,
                    || "syntactic loop iterate out of bounds".into());
            }
        }

        // mu <= nu for both forward characteristic maps, per loop.
        let mut loops = Vec::new();
        collect_loops(&program, &mut loops);
        for loop_stmt in loops {
            let Stmt::While(guard, body) = loop_stmt else { unreachable!() };
            let guard_set = states_of(guard, &space);
            let arg = &rows[0].arg;
            ctx.report.loops_checked += 1;

            // Forward sp map: Phi(Y) = B  ∪ sp(body, Y ∧ φ).
            let mu = kleene_polarity(&mut engine, space.size(), false, |eng, y| {
                arg.union(&eng.sp(body, &y.intersect(&guard_set)))
            });
            let nu = kleene_polarity(&mut engine, space.size(), true, |eng, y| {
                arg.union(&eng.sp(body, &y.intersect(&guard_set)))
            });
            ctx.check("mu below nu (sp map)", mu.is_subset(&nu), || "muPhi not below nuPhi".into());

            // Forward slp map: Phi(Y) = B ∧ slp(body, ¬φ ∨ Y).
            let mu = kleene_polarity(&mut engine, space.size(), false, |eng, y| {
                arg.intersect(&eng.slp(body, &guard_set.complement().union(y)))
            });
            let nu = loop_gfp(&mut engine, ParkTransformer::Slp, &guard_set, body, arg);
            ctx.check("mu below nu (slp map)", mu.is_subset(&nu), || "muPhi not below nuPhi".into());
        }

        // Kleene discipline over everything the engine just did.
        for trace in engine.take_traces() {
            ctx.report.max_fixpoint_iterations =
                ctx.report.max_fixpoint_iterations.max(trace.iterations);
            ctx.check(
                "kleene discipline",
                trace.converged && trace.iterations <= space.size() + 1,
                || {
                    format!(
                        "loop {} took {} iterations over {} states",
                        trace.loop_label,
                        trace.iterations,
                        space.size()
                    )
                },
            );
        }
    }
    report
}

fn kleene_polarity(
    engine: &mut Engine,
    size: usize,
    from_top: bool,
    step: impl Fn(&mut Engine, &StateSet) -> StateSet,
) -> StateSet {
    let mut current = if from_top {
        StateSet::full(size)
    } else {
        StateSet::empty(size)
    };
    for _ in 0..=size + 1 {
        let next = step(engine, &current);
        if next == current {
            return current;
        }
        current = next;
    }
    unreachable!("fixpoint iteration failed to stabilize")
}

// ----------------------------------------------------------------------
// Park induction suite
// ----------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ParkConfig {
    pub seed: u64,
    pub loops: usize,
    pub invariants_per_loop: usize,
    pub max_vars: usize,
    pub max_domain_size: u64,
}

impl Default for ParkConfig {
    fn default() -> Self {
        ParkConfig {
            seed: 1,
            loops: 100,
            invariants_per_loop: 20,
            max_vars: 3,
            max_domain_size: 5,
        }
    }
}

#[derive(Debug, Default)]
pub struct ParkReport {
    pub loops: usize,
    pub certificates: u64,
    pub premise_passes: u64,
    pub variant_certificates: u64,
    pub variant_passes: u64,
    pub violations: Vec<Violation>,
}

impl ParkReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Random Park certificates: for every premise-passing invariant, the
/// conclusion `I ⊆ νΦ` must be engine-verified; Φ must also be monotone.
pub fn run_park_suite(cfg: &ParkConfig) -> ParkReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = ParkReport::default();
    let gen_cfg = FuzzConfig {
        max_vars: cfg.max_vars,
        max_domain_size: cfg.max_domain_size,
        max_stmts: 5,
        max_loop_depth: 1,
        ..FuzzConfig::default()
    };

    for _ in 0..cfg.loops {
        let decls = gen_decls(&mut rng, &gen_cfg);
        let space = StateSpace::enumerate(&decls, 1 << 20).expect("fuzz spaces are small");
        let guard = gen_guard(&mut rng, &decls, 1);
        let mut body_budget = rng.gen_range(1..=4);
        let body = gen_stmt(&mut rng, &decls, &mut body_budget, 1, &gen_cfg);
        let body = desugar(&body, &decls).expect("declarations are nonempty");
        let guard_set = states_of(&guard, &space);
        let loop_text = format!("while ({guard}) {{ {body} }}");
        report.loops += 1;

        let mut engine = Engine::new(&space);
        for transformer in [ParkTransformer::Wlp, ParkTransformer::Slp] {
            let argument = gen_set(&mut rng, space.size());
            let fixpoint = loop_gfp(&mut engine, transformer, &guard_set, &body, &argument);

            let mut invariants: Vec<StateSet> = (0..cfg.invariants_per_loop)
                .map(|_| gen_set(&mut rng, space.size()))
                .collect();
            invariants.push(StateSet::empty(space.size()));
            invariants.push(fixpoint.clone());

            for invariant in &invariants {
                report.certificates += 1;
                let result = park_check_sets(
                    &mut engine,
                    transformer,
                    &guard_set,
                    &body,
                    invariant,
                    &argument,
                )
                .expect("loop shape is fixed here");
                if result.premise {
                    report.premise_passes += 1;
                    if !result.conclusion_verified {
                        report.violations.push(Violation {
                            check: format!("park soundness ({})", transformer.name()),
                            program: loop_text.clone(),
                            decls: describe_decls(&decls),
                            detail: format!(
                                "premise-passing invariant of size {} not below the fixed point",
                                invariant.count()
                            ),
                        });
                    }
                }
            }

            // Monotonicity of the characteristic map on a nested pair.
            let a = gen_set(&mut rng, space.size());
            let b = a.union(&gen_set(&mut rng, space.size()));
            let step_a = park_step_for_test(&mut engine, transformer, &guard_set, &body, &argument, &a);
            let step_b = park_step_for_test(&mut engine, transformer, &guard_set, &body, &argument, &b);
            if !step_a.is_subset(&step_b) {
                report.violations.push(Violation {
                    check: format!("park monotonicity ({})", transformer.name()),
                    program: loop_text.clone(),
                    decls: describe_decls(&decls),
                    detail: "characteristic map is not monotone".to_string(),
                });
            }
        }

        // Soundness of both variant rules on the same loop, with random
        // variant expressions (negative-valued ones are rejected upstream
        // and skipped here).
        let loop_program = Stmt::while_loop(guard.clone(), body.clone());
        for _ in 0..2 {
            let cert = crate::proofs::VariantCertificate {
                loop_program: loop_program.clone(),
                variant: gen_expr(&mut rng, &decls, 2),
            };
            if let Ok(result) = crate::proofs::variant_check(&mut engine, &cert) {
                report.variant_certificates += 1;
                if result.all_hold {
                    report.variant_passes += 1;
                    if !result.termination_verified {
                        report.violations.push(Violation {
                            check: "variant soundness".to_string(),
                            program: loop_text.clone(),
                            decls: describe_decls(&decls),
                            detail: format!(
                                "variant {} passed but {} states do not terminate",
                                cert.variant, result.non_terminating_states
                            ),
                        });
                    }
                }
            }
            if let Ok(result) = crate::proofs::backward_variant_check(&mut engine, &cert) {
                report.variant_certificates += 1;
                if result.per_value.iter().any(|c| c.holds) {
                    report.variant_passes += 1;
                }
                if !result.witnesses_verified {
                    report.violations.push(Violation {
                        check: "backward variant soundness".to_string(),
                        program: loop_text.clone(),
                        decls: describe_decls(&decls),
                        detail: format!(
                            "variant {} certified {} exit states the engine cannot reach",
                            cert.variant,
                            result.reachable_witness_set.count()
                        ),
                    });
                }
            }
        }
    }
    report
}

fn park_step_for_test(
    engine: &mut Engine,
    transformer: ParkTransformer,
    guard_set: &StateSet,
    body: &Stmt,
    argument: &StateSet,
    x: &StateSet,
) -> StateSet {
    match transformer {
        ParkTransformer::Wlp => guard_set
            .complement()
            .intersect(argument)
            .union(&guard_set.intersect(&engine.wlp(body, x))),
        ParkTransformer::Slp => {
            argument.intersect(&engine.slp(body, &guard_set.complement().union(x)))
        }
    }
}
