//! Abstract syntax for programs, expressions and predicate formulas.
//!
//! Programs are a deterministic while-language: `diverge`, `skip`,
//! assignment, sequencing, `if`/`else` and `while`. Formulas are boolean
//! predicates over the declared variables with bounded quantifiers.
//! `skip` is sugar and is removed by [`desugar`] before any analysis.

use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Variable domain: either boolean or an inclusive integer interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Bool,
    Int { lo: i64, hi: i64 },
}

impl Domain {
    /// Number of values in the domain (saturating for intervals wider
    /// than u64; such spaces are rejected by the state-count guard).
    pub fn size(&self) -> u64 {
        match *self {
            Domain::Bool => 2,
            Domain::Int { lo, hi } => {
                u64::try_from(hi as i128 - lo as i128 + 1).unwrap_or(u64::MAX)
            }
        }
    }

    /// Smallest value (booleans are encoded as 0/1).
    pub fn lo(&self) -> i64 {
        match *self {
            Domain::Bool => 0,
            Domain::Int { lo, .. } => lo,
        }
    }

    /// Largest value.
    pub fn hi(&self) -> i64 {
        match *self {
            Domain::Bool => 1,
            Domain::Int { hi, .. } => hi,
        }
    }

    pub fn contains(&self, v: i64) -> bool {
        v >= self.lo() && v <= self.hi()
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Domain::Bool => write!(f, "bool"),
            Domain::Int { lo, hi } => write!(f, "int[{lo}..{hi}]"),
        }
    }
}

/// A declared program variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub domain: Domain,
}

/// Binary arithmetic operator. `%` is Euclidean: the result of `a % m`
/// is in `[0, |m|)`; `a % 0` is defined as `a` to keep evaluation total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Mod,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Mod => "%",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Mod => 2,
        }
    }
}

/// Integer expression over program variables and quantifier-bound names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i64),
    Var(String),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    /// Variables read by this expression.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(name) => {
                out.insert(name.clone());
            }
            Expr::Bin(_, lhs, rhs) => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Const(_) | Expr::Var(_) => 3,
            Expr::Bin(op, _, _) => op.precedence(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8, right: bool) -> fmt::Result {
        let mine = self.precedence();
        // Parenthesize when binding looser than the context, or on the right
        // of an equal-precedence operator so that printing round-trips the
        // left-associative parse exactly.
        let need = mine < parent || (mine == parent && right && mine < 3);
        if need {
            write!(f, "(")?;
        }
        match self {
            Expr::Const(n) => write!(f, "{n}")?,
            Expr::Var(name) => write!(f, "{name}")?,
            Expr::Bin(op, lhs, rhs) => {
                lhs.fmt_prec(f, mine, false)?;
                write!(f, " {} ", op.symbol())?;
                rhs.fmt_prec(f, mine, true)?;
            }
        }
        if need {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, false)
    }
}

/// Comparison operator between integer expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn eval(self, lhs: i128, rhs: i128) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// Predicate formula. Boolean variables appear directly as atoms; bounded
/// quantifiers range over an explicit inclusive integer interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Bool(bool),
    /// Boolean variable used as an atom.
    Var(String),
    Cmp(CmpOp, Expr, Expr),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant {
        q: Quantifier,
        var: String,
        lo: i64,
        hi: i64,
        body: Box<Formula>,
    },
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn cmp(op: CmpOp, lhs: Expr, rhs: Expr) -> Formula {
        Formula::Cmp(op, lhs, rhs)
    }

    pub fn forall(var: impl Into<String>, lo: i64, hi: i64, body: Formula) -> Formula {
        Formula::Quant {
            q: Quantifier::Forall,
            var: var.into(),
            lo,
            hi,
            body: Box::new(body),
        }
    }

    /// Free (unbound) variables of the formula.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Bool(_) => {}
            Formula::Var(name) => {
                if !bound.iter().any(|b| b == name) {
                    out.insert(name.clone());
                }
            }
            Formula::Cmp(_, lhs, rhs) => {
                for name in lhs.vars().union(&rhs.vars()) {
                    if !bound.iter().any(|b| b == name) {
                        out.insert(name.clone());
                    }
                }
            }
            Formula::Not(inner) => inner.collect_free(bound, out),
            Formula::And(lhs, rhs) | Formula::Or(lhs, rhs) | Formula::Implies(lhs, rhs) => {
                lhs.collect_free(bound, out);
                rhs.collect_free(bound, out);
            }
            Formula::Quant { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// All identifiers occurring anywhere in the formula, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Bool(_) => {}
            Formula::Var(name) => {
                out.insert(name.clone());
            }
            Formula::Cmp(_, lhs, rhs) => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            Formula::Not(inner) => inner.collect_names(out),
            Formula::And(lhs, rhs) | Formula::Or(lhs, rhs) | Formula::Implies(lhs, rhs) => {
                lhs.collect_names(out);
                rhs.collect_names(out);
            }
            Formula::Quant { var, body, .. } => {
                out.insert(var.clone());
                body.collect_names(out);
            }
        }
    }

    /// True when the formula contains no quantifier (required of guards).
    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Bool(_) | Formula::Var(_) | Formula::Cmp(..) => true,
            Formula::Not(inner) => inner.is_quantifier_free(),
            Formula::And(lhs, rhs) | Formula::Or(lhs, rhs) | Formula::Implies(lhs, rhs) => {
                lhs.is_quantifier_free() && rhs.is_quantifier_free()
            }
            Formula::Quant { .. } => false,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) | Formula::Quant { .. } => 0,
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Not(..) => 3,
            Formula::Bool(_) | Formula::Var(_) | Formula::Cmp(..) => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8, right: bool) -> fmt::Result {
        let mine = self.precedence();
        let need = match self {
            // `->` is right-associative, so only its left operand needs parens.
            Formula::Implies(..) => mine < parent || (mine == parent && !right),
            Formula::Quant { .. } => parent > 0,
            _ => mine < parent || (mine == parent && right && mine < 3),
        };
        if need {
            write!(f, "(")?;
        }
        match self {
            Formula::Bool(b) => write!(f, "{b}")?,
            Formula::Var(name) => write!(f, "{name}")?,
            Formula::Cmp(op, lhs, rhs) => write!(f, "{} {} {}", lhs, op.symbol(), rhs)?,
            Formula::Not(inner) => {
                write!(f, "!")?;
                match **inner {
                    // Comparisons must be parenthesized under `!` so that the
                    // printed form re-parses with the same structure.
                    Formula::Bool(_) | Formula::Var(_) | Formula::Not(_) => {
                        inner.fmt_prec(f, 3, false)?
                    }
                    _ => write!(f, "({inner})")?,
                }
            }
            Formula::And(lhs, rhs) => {
                lhs.fmt_prec(f, mine, false)?;
                write!(f, " && ")?;
                rhs.fmt_prec(f, mine, true)?;
            }
            Formula::Or(lhs, rhs) => {
                lhs.fmt_prec(f, mine, false)?;
                write!(f, " || ")?;
                rhs.fmt_prec(f, mine, true)?;
            }
            Formula::Implies(lhs, rhs) => {
                lhs.fmt_prec(f, mine, false)?;
                write!(f, " -> ")?;
                rhs.fmt_prec(f, mine, true)?;
            }
            Formula::Quant { q, var, lo, hi, body } => {
                write!(f, "{} {} in {}..{}: ", q.keyword(), var, lo, hi)?;
                body.fmt_prec(f, 0, true)?;
            }
        }
        if need {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, true)
    }
}

/// Program statement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Diverge,
    Skip,
    Assign(String, Expr),
    Seq(Box<Stmt>, Box<Stmt>),
    Ite(Formula, Box<Stmt>, Box<Stmt>),
    While(Formula, Box<Stmt>),
}

impl Stmt {
    pub fn seq(first: Stmt, second: Stmt) -> Stmt {
        Stmt::Seq(Box::new(first), Box::new(second))
    }

    pub fn ite(guard: Formula, then_branch: Stmt, else_branch: Stmt) -> Stmt {
        Stmt::Ite(guard, Box::new(then_branch), Box::new(else_branch))
    }

    pub fn while_loop(guard: Formula, body: Stmt) -> Stmt {
        Stmt::While(guard, Box::new(body))
    }

    pub fn assign(var: impl Into<String>, expr: Expr) -> Stmt {
        Stmt::Assign(var.into(), expr)
    }

    /// Variables read or written anywhere in the program.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Stmt::Diverge | Stmt::Skip => {}
            Stmt::Assign(var, expr) => {
                out.insert(var.clone());
                expr.collect_vars(out);
            }
            Stmt::Seq(first, second) => {
                first.collect_vars(out);
                second.collect_vars(out);
            }
            Stmt::Ite(guard, then_branch, else_branch) => {
                out.extend(guard.free_vars());
                then_branch.collect_vars(out);
                else_branch.collect_vars(out);
            }
            Stmt::While(guard, body) => {
                out.extend(guard.free_vars());
                body.collect_vars(out);
            }
        }
    }

    pub fn contains_skip(&self) -> bool {
        match self {
            Stmt::Skip => true,
            Stmt::Diverge | Stmt::Assign(..) => false,
            Stmt::Seq(first, second) => first.contains_skip() || second.contains_skip(),
            Stmt::Ite(_, then_branch, else_branch) => {
                then_branch.contains_skip() || else_branch.contains_skip()
            }
            Stmt::While(_, body) => body.contains_skip(),
        }
    }

}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Diverge => write!(f, "diverge"),
            Stmt::Skip => write!(f, "skip"),
            Stmt::Assign(var, expr) => write!(f, "{var} := {expr}"),
            Stmt::Seq(first, second) => {
                // A nested sequence on the left is braced so the printed
                // form re-parses to the same tree shape.
                if matches!(**first, Stmt::Seq(..)) {
                    write!(f, "{{ {first} }}; {second}")
                } else {
                    write!(f, "{first}; {second}")
                }
            }
            Stmt::Ite(guard, then_branch, else_branch) => {
                write!(f, "if ({guard}) {{ {then_branch} }} else {{ {else_branch} }}")
            }
            Stmt::While(guard, body) => write!(f, "while ({guard}) {{ {body} }}"),
        }
    }
}

/// One of the four predicate transformers, as named in query directives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformerKind {
    Wp,
    Wlp,
    Sp,
    Slp,
}

impl TransformerKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformerKind::Wp => "wp",
            TransformerKind::Wlp => "wlp",
            TransformerKind::Sp => "sp",
            TransformerKind::Slp => "slp",
        }
    }

    /// Forward transformers map preconditions to postconditions.
    pub fn is_forward(self) -> bool {
        matches!(self, TransformerKind::Sp | TransformerKind::Slp)
    }
}

impl fmt::Display for TransformerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Which of the four validity notions a triple is checked under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Notion {
    TotalCorrectness,
    PartialCorrectness,
    TotalIncorrectness,
    PartialIncorrectness,
}

impl Notion {
    pub fn keyword(self) -> &'static str {
        match self {
            Notion::TotalCorrectness => "total_correctness",
            Notion::PartialCorrectness => "partial_correctness",
            Notion::TotalIncorrectness => "total_incorrectness",
            Notion::PartialIncorrectness => "partial_incorrectness",
        }
    }

    /// Incorrectness triples are conventionally written with brackets.
    pub fn is_incorrectness(self) -> bool {
        matches!(self, Notion::TotalIncorrectness | Notion::PartialIncorrectness)
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.keyword())
    }
}

/// A correctness or incorrectness triple over a concrete program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub pre: Formula,
    pub program: Stmt,
    pub post: Formula,
    pub notion: Notion,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DesugarError {
    #[error("cannot desugar `skip`: no variables are declared")]
    SkipWithoutVars,
}

/// Replace every `skip` with a self-assignment on the first declared
/// variable. All other nodes are returned unchanged.
pub fn desugar(stmt: &Stmt, decls: &[VarDecl]) -> Result<Stmt, DesugarError> {
    match stmt {
        Stmt::Skip => {
            let var = decls.first().ok_or(DesugarError::SkipWithoutVars)?;
            Ok(Stmt::Assign(var.name.clone(), Expr::Var(var.name.clone())))
        }
        Stmt::Diverge => Ok(Stmt::Diverge),
        Stmt::Assign(var, expr) => Ok(Stmt::Assign(var.clone(), expr.clone())),
        Stmt::Seq(first, second) => Ok(Stmt::seq(desugar(first, decls)?, desugar(second, decls)?)),
        Stmt::Ite(guard, then_branch, else_branch) => Ok(Stmt::ite(
            guard.clone(),
            desugar(then_branch, decls)?,
            desugar(else_branch, decls)?,
        )),
        Stmt::While(guard, body) => Ok(Stmt::while_loop(guard.clone(), desugar(body, decls)?)),
    }
}
