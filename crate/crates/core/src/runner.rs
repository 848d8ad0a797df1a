//! Executes a parsed spec file: runs every directive through the selected
//! engine(s), cross-checks routes where more than one exists, and
//! assembles the report.

use crate::eval::{formula_of_set, states_of};
use crate::parser::{DecomposeKind, Directive, Expectation, ParseError, SpecFile};
use crate::proofs::{
    backward_variant_check, park_check, CertificateError, ParkCertificate, ParkTransformer,
    VariantCertificate,
};
use crate::report::{AnnotationReport, DirectiveReport, FixpointTraceReport, Report};
use crate::slp_rules;
use crate::statespace::{SpaceError, State, StateSet, StateSpace};
use crate::syntax::{desugar, DesugarError, Domain, Formula, Notion, Stmt, TransformerKind};
use crate::transformers::{annotate, Annotation, Engine, FixpointPolarity, FixpointTrace};
use crate::triples;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Semantic,
    Syntactic,
    Both,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub engine: EngineChoice,
    pub annotate: bool,
    pub trace_fixpoints: bool,
    pub max_states: u64,
    /// Test hook: corrupt the syntactic engine's result by one state to
    /// force a visible engine disagreement.
    pub corrupt_syntactic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            engine: EngineChoice::Both,
            annotate: false,
            trace_fixpoints: false,
            max_states: 1 << 20,
            corrupt_syntactic: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Desugar(#[from] DesugarError),
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    /// Every `expect valid|invalid` annotation matched its verdict.
    pub expectations_met: bool,
}

/// Parse and run a spec file.
pub fn run_spec_text(text: &str, cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let spec = crate::parser::parse_spec(text)?;
    run_spec(&spec, cfg)
}

pub fn run_spec(spec: &SpecFile, cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let space = StateSpace::enumerate(&spec.decls, cfg.max_states)?;
    let mut programs: Vec<(String, Stmt)> = Vec::new();
    for (name, body) in &spec.programs {
        programs.push((name.clone(), desugar(body, &spec.decls)?));
    }
    let lookup = |name: &str| -> &Stmt {
        &programs
            .iter()
            .find(|(n, _)| n == name)
            .expect("directive references are validated at parse time")
            .1
    };

    let mut runner = Runner {
        space: &space,
        cfg,
        agreement: true,
        expectations_met: true,
    };
    let mut directives = Vec::new();
    for directive in &spec.directives {
        let program = lookup(directive.program_name());
        directives.push(runner.run_directive(directive, program));
    }

    Ok(RunOutcome {
        report: Report {
            directives,
            engine_agreement: runner.agreement,
        },
        expectations_met: runner.expectations_met,
    })
}

struct Runner<'a> {
    space: &'a StateSpace,
    cfg: &'a RunConfig,
    agreement: bool,
    expectations_met: bool,
}

impl Runner<'_> {
    fn state_json(&self, state: &State) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (i, decl) in self.space.decls().iter().enumerate() {
            let value = match decl.domain {
                Domain::Bool => json!(state.get(i) != 0),
                Domain::Int { .. } => json!(state.get(i)),
            };
            map.insert(decl.name.clone(), value);
        }
        serde_json::Value::Object(map)
    }

    fn expectation(&mut self, expect: Option<Expectation>, valid: bool) -> (Option<String>, Option<bool>) {
        match expect {
            None => (None, None),
            Some(e) => {
                let met = match e {
                    Expectation::Valid => valid,
                    Expectation::Invalid => !valid,
                };
                self.expectations_met &= met;
                let text = match e {
                    Expectation::Valid => "valid",
                    Expectation::Invalid => "invalid",
                };
                (Some(text.to_string()), Some(met))
            }
        }
    }

    fn trace_report(&self, traces: Vec<FixpointTrace>) -> Option<Vec<FixpointTraceReport>> {
        if !self.cfg.trace_fixpoints {
            return None;
        }
        Some(
            traces
                .into_iter()
                .map(|t| FixpointTraceReport {
                    transformer: t.transformer.name().to_string(),
                    polarity: match t.polarity {
                        FixpointPolarity::Least => "least".to_string(),
                        FixpointPolarity::Greatest => "greatest".to_string(),
                    },
                    loop_label: t.loop_label,
                    iterations: t.iterations,
                    sizes: t.sizes,
                    converged: t.converged,
                })
                .collect(),
        )
    }

    /// The syntactic route for slp, optionally corrupted by the test hook.
    fn syntactic_slp(&self, program: &Stmt, pre: &Formula) -> (slp_rules::SlpRun, StateSet) {
        let run = slp_rules::slp_run(program, pre, self.space, false);
        let mut set = states_of(&run.formula, self.space);
        if self.cfg.corrupt_syntactic {
            if set.contains(0) {
                set.remove(0);
            } else {
                set.insert(0);
            }
        }
        (run, set)
    }

    fn run_directive(&mut self, directive: &Directive, program: &Stmt) -> DirectiveReport {
        match directive {
            Directive::Check { notion, pre, program: name, post, expect } => {
                self.run_check(*notion, pre, name, program, post, *expect)
            }
            Directive::Query { transformer, program: name, arg } => {
                self.run_query(*transformer, name, program, arg)
            }
            Directive::Park { transformer, program: name, invariant, argument, expect } => {
                self.run_park(*transformer, name, program, invariant, argument, *expect)
            }
            Directive::Variant { program: name, variant, expect } => {
                self.run_variant(name, program, variant, *expect)
            }
            Directive::BackwardVariant { program: name, variant, expect } => {
                self.run_backward_variant(name, program, variant, *expect)
            }
            Directive::Decompose { kind, pre, program: name, post, expect } => {
                self.run_decompose(*kind, pre, name, program, post, *expect)
            }
        }
    }

    fn run_check(
        &mut self,
        notion: Notion,
        pre: &Formula,
        name: &str,
        program: &Stmt,
        post: &Formula,
        expect: Option<Expectation>,
    ) -> DirectiveReport {
        let mut engine = Engine::new(self.space);
        let pre_set = states_of(pre, self.space);
        let post_set = states_of(post, self.space);
        let mut verdict = triples::check_sets(&mut engine, &pre_set, program, &post_set, notion);

        // Partial incorrectness is the one notion with three routes: the
        // dual-of-sp engine, the direct liberal recursion, and the
        // syntactic rule engine.
        if notion == Notion::PartialIncorrectness && self.cfg.engine != EngineChoice::Semantic {
            let semantic = engine.slp(program, &pre_set);
            let direct = engine.slp_direct(program, &pre_set);
            let (_, syntactic) = self.syntactic_slp(program, pre);
            if direct != semantic || syntactic != semantic {
                self.agreement = false;
            }
            if self.cfg.engine == EngineChoice::Syntactic {
                let check = triples::subset_check(self.space, &post_set, &syntactic);
                verdict = triples::Verdict {
                    notion,
                    valid: check.holds,
                    witness: check.witness,
                    lhs_size: check.lhs_size,
                    rhs_size: check.rhs_size,
                };
            }
        }

        let (expect_text, met) = self.expectation(expect, verdict.valid);
        let (open, close) = if notion.is_incorrectness() { ("[", "]") } else { ("{", "}") };
        let mut summary = format!(
            "check {} {open}{pre}{close} {name} {open}{post}{close}: {}",
            notion.keyword(),
            if verdict.valid { "VALID" } else { "INVALID" },
        );
        if let Some(w) = &verdict.witness {
            summary.push_str(&format!(", witness {}", self.space.describe(w)));
        }
        if let Some(met) = met {
            summary.push_str(if met { " (as expected)" } else { " (EXPECTATION FAILED)" });
        }

        DirectiveReport {
            kind: "check".to_string(),
            program: name.to_string(),
            notion: Some(notion.keyword().to_string()),
            valid: Some(verdict.valid),
            witness: verdict.witness.as_ref().map(|w| self.state_json(w)),
            annotations: Vec::new(),
            trace: self.trace_report(engine.take_traces()),
            expect: expect_text,
            expectation_met: met,
            details: json!({
                "pre": pre.to_string(),
                "post": post.to_string(),
                "lhs_size": verdict.lhs_size,
                "rhs_size": verdict.rhs_size,
            }),
            summary,
            listing: Vec::new(),
        }
    }

    fn run_query(
        &mut self,
        transformer: TransformerKind,
        name: &str,
        program: &Stmt,
        arg: &Formula,
    ) -> DirectiveReport {
        let mut engine = Engine::new(self.space);
        let arg_set = states_of(arg, self.space);
        let mut result = engine.apply(transformer, program, &arg_set);

        let mut formula_text: Option<String> = None;
        let mut rule_steps = serde_json::Value::Null;
        if transformer == TransformerKind::Slp && self.cfg.engine != EngineChoice::Semantic {
            let direct = engine.slp_direct(program, &arg_set);
            let (run, syntactic) = self.syntactic_slp(program, arg);
            if direct != result || syntactic != result {
                self.agreement = false;
            }
            formula_text = Some(slp_rules::simplify(&run.formula, self.space).to_string());
            let shown: Vec<serde_json::Value> = run
                .steps
                .iter()
                .take(32)
                .map(|s| json!({ "rule": s.rule, "output": s.output.to_string() }))
                .collect();
            rule_steps = json!({ "applied": run.steps.len(), "first": shown });
            if self.cfg.engine == EngineChoice::Syntactic {
                result = syntactic;
            }
        }
        if formula_text.is_none() {
            let co = self.space.size() - result.count();
            if result.count().min(co) <= 64 {
                formula_text =
                    Some(slp_rules::simplify(&formula_of_set(&result, self.space), self.space).to_string());
            }
        }

        let mut annotations = Vec::new();
        let mut listing = Vec::new();
        if self.cfg.annotate && transformer.is_forward() {
            let (points, ok) = annotate(self.space, program, arg, transformer);
            if !ok {
                self.agreement = false;
            }
            listing = annotated_listing(program, &points);
            annotations = points
                .into_iter()
                .map(|a| AnnotationReport {
                    label: a.label,
                    depth: a.depth,
                    formula: a.formula.to_string(),
                    states: a.set.count(),
                })
                .collect();
        }

        let summary = format!(
            "query {transformer} {name} {{{arg}}}: {} of {} states{}",
            result.count(),
            self.space.size(),
            match &formula_text {
                Some(f) => format!(" = {f}"),
                None => String::new(),
            }
        );

        DirectiveReport {
            kind: "query".to_string(),
            program: name.to_string(),
            notion: None,
            valid: None,
            witness: None,
            annotations,
            trace: self.trace_report(engine.take_traces()),
            expect: None,
            expectation_met: None,
            details: json!({
                "transformer": transformer.name(),
                "arg": arg.to_string(),
                "states": result.count(),
                "space": self.space.size(),
                "formula": formula_text,
                "rule_steps": rule_steps,
            }),
            summary,
            listing,
        }
    }

    fn run_park(
        &mut self,
        transformer: TransformerKind,
        name: &str,
        program: &Stmt,
        invariant: &Formula,
        argument: &Formula,
        expect: Option<Expectation>,
    ) -> DirectiveReport {
        let mut engine = Engine::new(self.space);
        let kind = match transformer {
            TransformerKind::Wlp => ParkTransformer::Wlp,
            TransformerKind::Slp => ParkTransformer::Slp,
            _ => unreachable!("park transformers are validated at parse time"),
        };
        let cert = ParkCertificate {
            loop_program: program.clone(),
            transformer: kind,
            invariant: invariant.clone(),
            argument: argument.clone(),
        };
        let result = park_check(&mut engine, &cert)
            .expect("loop shape is validated at parse time");
        if result.premise && !result.conclusion_verified {
            self.agreement = false;
        }
        let valid = result.premise && result.conclusion_verified;
        let (expect_text, met) = self.expectation(expect, valid);

        let mut summary = format!(
            "park {} {name} {{{invariant}}} {{{argument}}}: premise {}",
            kind.name(),
            if result.premise { "HOLDS" } else { "FAILS" },
        );
        if result.premise {
            summary.push_str(&format!(
                "; invariant ({} states) below the fixed point ({} states): {}",
                result.invariant_size,
                result.fixpoint.count(),
                if result.conclusion_verified { "verified" } else { "REFUTED" },
            ));
        } else if let Some(w) = &result.premise_witness {
            summary.push_str(&format!(", witness {}", self.space.describe(w)));
        }
        if let Some(met) = met {
            summary.push_str(if met { " (as expected)" } else { " (EXPECTATION FAILED)" });
        }

        DirectiveReport {
            kind: "park".to_string(),
            program: name.to_string(),
            notion: None,
            valid: Some(valid),
            witness: result.premise_witness.as_ref().map(|w| self.state_json(w)),
            annotations: Vec::new(),
            trace: self.trace_report(engine.take_traces()),
            expect: expect_text,
            expectation_met: met,
            details: json!({
                "transformer": kind.name(),
                "invariant": invariant.to_string(),
                "argument": argument.to_string(),
                "premise": result.premise,
                "invariant_size": result.invariant_size,
                "fixpoint_size": result.fixpoint.count(),
                "conclusion_verified": result.conclusion_verified,
            }),
            summary,
            listing: Vec::new(),
        }
    }

    fn run_variant(
        &mut self,
        name: &str,
        program: &Stmt,
        variant: &crate::syntax::Expr,
        expect: Option<Expectation>,
    ) -> DirectiveReport {
        let mut engine = Engine::new(self.space);
        let cert = VariantCertificate {
            loop_program: program.clone(),
            variant: variant.clone(),
        };
        match crate::proofs::variant_check(&mut engine, &cert) {
            Err(err) => self.certificate_failure("variant", name, variant, err, expect),
            Ok(result) => {
                if result.all_hold && !result.termination_verified {
                    self.agreement = false;
                }
                let valid = result.all_hold;
                let (expect_text, met) = self.expectation(expect, valid);
                let per_value: Vec<serde_json::Value> = result
                    .per_value
                    .iter()
                    .map(|c| {
                        json!({
                            "value": c.value,
                            "holds": c.holds,
                            "witness": c.witness.as_ref().map(|w| self.state_json(w)),
                        })
                    })
                    .collect();
                let failing: Vec<i64> =
                    result.per_value.iter().filter(|c| !c.holds).map(|c| c.value).collect();
                let mut summary = format!(
                    "variant {name} {{{variant}}}: {}",
                    if valid { "PASS (all attained values decrease)" } else { "FAIL" }
                );
                if !failing.is_empty() {
                    summary.push_str(&format!(" at v = {failing:?}"));
                }
                summary.push_str(&format!(
                    "; universal termination {}",
                    if result.termination_verified {
                        "engine-verified".to_string()
                    } else {
                        format!("refuted ({} non-terminating states)", result.non_terminating_states)
                    }
                ));
                if let Some(met) = met {
                    summary.push_str(if met { " (as expected)" } else { " (EXPECTATION FAILED)" });
                }
                DirectiveReport {
                    kind: "variant".to_string(),
                    program: name.to_string(),
                    notion: None,
                    valid: Some(valid),
                    witness: None,
                    annotations: Vec::new(),
                    trace: self.trace_report(engine.take_traces()),
                    expect: expect_text,
                    expectation_met: met,
                    details: json!({
                        "variant": variant.to_string(),
                        "per_value": per_value,
                        "all_hold": result.all_hold,
                        "termination_verified": result.termination_verified,
                        "non_terminating_states": result.non_terminating_states,
                    }),
                    summary,
                    listing: Vec::new(),
                }
            }
        }
    }

    fn run_backward_variant(
        &mut self,
        name: &str,
        program: &Stmt,
        variant: &crate::syntax::Expr,
        expect: Option<Expectation>,
    ) -> DirectiveReport {
        let mut engine = Engine::new(self.space);
        let cert = VariantCertificate {
            loop_program: program.clone(),
            variant: variant.clone(),
        };
        match backward_variant_check(&mut engine, &cert) {
            Err(err) => self.certificate_failure("backward_variant", name, variant, err, expect),
            Ok(result) => {
                if !result.witnesses_verified {
                    self.agreement = false;
                }
                let valid = result.accepted;
                let (expect_text, met) = self.expectation(expect, valid);
                let per_value: Vec<serde_json::Value> = result
                    .per_value
                    .iter()
                    .map(|c| {
                        json!({
                            "value": c.value,
                            "holds": c.holds,
                            "witness": c.witness.as_ref().map(|w| self.state_json(w)),
                        })
                    })
                    .collect();
                let passing: Vec<i64> =
                    result.per_value.iter().filter(|c| c.holds).map(|c| c.value).collect();
                let mut summary = format!(
                    "backward_variant {name} {{{variant}}}: {}",
                    if result.per_value.is_empty() {
                        "PASS (vacuous: no value above 0 attained)".to_string()
                    } else if valid {
                        format!("PASS at v = {passing:?}")
                    } else {
                        "FAIL (no value has an in-guard predecessor step)".to_string()
                    }
                );
                summary.push_str(&format!(
                    "; {} exit states certified reachable ({})",
                    result.reachable_witness_set.count(),
                    if result.witnesses_verified { "engine-verified" } else { "ENGINE REFUTES" },
                ));
                if let Some(met) = met {
                    summary.push_str(if met { " (as expected)" } else { " (EXPECTATION FAILED)" });
                }
                DirectiveReport {
                    kind: "backward_variant".to_string(),
                    program: name.to_string(),
                    notion: None,
                    valid: Some(valid),
                    witness: None,
                    annotations: Vec::new(),
                    trace: self.trace_report(engine.take_traces()),
                    expect: expect_text,
                    expectation_met: met,
                    details: json!({
                        "variant": variant.to_string(),
                        "per_value": per_value,
                        "all_hold": result.all_hold,
                        "accepted": result.accepted,
                        "reachable_witness_states": result.reachable_witness_set.count(),
                        "witnesses_verified": result.witnesses_verified,
                    }),
                    summary,
                    listing: Vec::new(),
                }
            }
        }
    }

    fn certificate_failure(
        &mut self,
        kind: &str,
        name: &str,
        variant: &crate::syntax::Expr,
        err: CertificateError,
        expect: Option<Expectation>,
    ) -> DirectiveReport {
        let (expect_text, met) = self.expectation(expect, false);
        let mut summary = format!("{kind} {name} {{{variant}}}: REJECTED ({err})");
        if let Some(met) = met {
            summary.push_str(if met { " (as expected)" } else { " (EXPECTATION FAILED)" });
        }
        DirectiveReport {
            kind: kind.to_string(),
            program: name.to_string(),
            notion: None,
            valid: Some(false),
            witness: None,
            annotations: Vec::new(),
            trace: None,
            expect: expect_text,
            expectation_met: met,
            details: json!({ "error": err.to_string() }),
            summary,
            listing: Vec::new(),
        }
    }

    fn run_decompose(
        &mut self,
        kind: DecomposeKind,
        pre: &Formula,
        name: &str,
        program: &Stmt,
        post: &Formula,
        expect: Option<Expectation>,
    ) -> DirectiveReport {
        let mut engine = Engine::new(self.space);
        let pre_set = states_of(pre, self.space);
        let post_set = states_of(post, self.space);
        let (d, side_name, open, close) = match kind {
            DecomposeKind::Correctness => (
                triples::decompose_correctness(&mut engine, &pre_set, program, &post_set),
                "termination",
                "{",
                "}",
            ),
            DecomposeKind::Incorrectness => (
                triples::decompose_incorrectness(&mut engine, &pre_set, program, &post_set),
                "reachability",
                "[",
                "]",
            ),
        };
        if !d.sound {
            self.agreement = false;
        }
        let (expect_text, met) = self.expectation(expect, d.direct_total.holds);
        let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let kind_name = match kind {
            DecomposeKind::Correctness => "correctness",
            DecomposeKind::Incorrectness => "incorrectness",
        };
        let mut summary = format!(
            "decompose {kind_name} {open}{pre}{close} {name} {open}{post}{close}: partial {} + {side_name} {} => total {}; direct total {}{}",
            mark(d.partial.holds),
            mark(d.side.holds),
            mark(d.implied_total),
            mark(d.direct_total.holds),
            if d.sound { "" } else { " (DECOMPOSITION UNSOUND)" },
        );
        if let Some(met) = met {
            summary.push_str(if met { " (as expected)" } else { " (EXPECTATION FAILED)" });
        }
        let witness = d
            .direct_total
            .witness
            .as_ref()
            .map(|w| self.state_json(w));
        DirectiveReport {
            kind: "decompose".to_string(),
            program: name.to_string(),
            notion: Some(kind_name.to_string()),
            valid: Some(d.direct_total.holds),
            witness,
            annotations: Vec::new(),
            trace: self.trace_report(engine.take_traces()),
            expect: expect_text,
            expectation_met: met,
            details: json!({
                "pre": pre.to_string(),
                "post": post.to_string(),
                "partial": d.partial.holds,
                "side": d.side.holds,
                "implied_total": d.implied_total,
                "direct_total": d.direct_total.holds,
                "sound": d.sound,
            }),
            summary,
            listing: Vec::new(),
        }
    }
}

/// Interleave bracketed annotation lines with the program source, in the
/// same order the annotation walk emits them.
fn annotated_listing(program: &Stmt, annotations: &[Annotation]) -> Vec<String> {
    let mut lines = Vec::new();
    let mut queue = annotations.iter().peekable();
    let mut emit = |depth: usize, text: String, lines: &mut Vec<String>| {
        lines.push(format!("{}{}", "  ".repeat(depth), text));
    };

    fn take_if<'a>(
        queue: &mut std::iter::Peekable<std::slice::Iter<'a, Annotation>>,
        matches: impl Fn(&str) -> bool,
    ) -> Option<&'a Annotation> {
        if queue.peek().is_some_and(|a| matches(&a.label)) {
            queue.next()
        } else {
            None
        }
    }

    fn walk(
        stmt: &Stmt,
        depth: usize,
        queue: &mut std::iter::Peekable<std::slice::Iter<'_, Annotation>>,
        emit: &mut impl FnMut(usize, String, &mut Vec<String>),
        lines: &mut Vec<String>,
    ) {
        match stmt {
            Stmt::Seq(first, second) => {
                walk(first, depth, queue, emit, lines);
                if let Some(last) = lines.last_mut() {
                    if !last.ends_with(['{', '}']) {
                        last.push(';');
                    }
                }
                if let Some(a) = take_if(queue, |l| l.starts_with("after ")) {
                    emit(depth, format!("[{}]", a.formula), lines);
                }
                walk(second, depth, queue, emit, lines);
            }
            Stmt::Ite(guard, then_branch, else_branch) => {
                emit(depth, format!("if ({guard}) {{"), lines);
                if let Some(a) = take_if(queue, |l| l == "then entry") {
                    emit(depth + 1, format!("[{}]", a.formula), lines);
                }
                walk(then_branch, depth + 1, queue, emit, lines);
                if let Some(a) = take_if(queue, |l| l == "then exit") {
                    emit(depth + 1, format!("[{}]", a.formula), lines);
                }
                emit(depth, "} else {".to_string(), lines);
                if let Some(a) = take_if(queue, |l| l == "else entry") {
                    emit(depth + 1, format!("[{}]", a.formula), lines);
                }
                walk(else_branch, depth + 1, queue, emit, lines);
                if let Some(a) = take_if(queue, |l| l == "else exit") {
                    emit(depth + 1, format!("[{}]", a.formula), lines);
                }
                emit(depth, "}".to_string(), lines);
            }
            Stmt::While(guard, body) => {
                emit(depth, format!("while ({guard}) {{"), lines);
                if let Some(a) = take_if(queue, |l| l == "loop body entry") {
                    emit(depth + 1, format!("[{}]", a.formula), lines);
                }
                walk(body, depth + 1, queue, emit, lines);
                if let Some(a) = take_if(queue, |l| l == "loop body exit") {
                    emit(depth + 1, format!("[{}]", a.formula), lines);
                }
                emit(depth, "}".to_string(), lines);
            }
            other => emit(depth, other.to_string(), lines),
        }
    }

    if let Some(a) = take_if(&mut queue, |l| l == "pre") {
        emit(0, format!("[{}]", a.formula), &mut lines);
    }
    walk(program, 0, &mut queue, &mut emit, &mut lines);
    if let Some(a) = take_if(&mut queue, |l| l == "post") {
        emit(0, format!("[{}]", a.formula), &mut lines);
    }
    lines
}
