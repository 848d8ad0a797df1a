//! Recursive descent parser for spec files: variable declarations, named
//! programs and check/query/proof directives.
//!
//! The grammar is LL with one backtracking point (a `(` at the start of a
//! formula atom may open either a parenthesized formula or a parenthesized
//! arithmetic expression). Parsed files are scope-checked before they are
//! returned, so downstream code can assume well-formed input.

use crate::lexer::{lex, Token, TokenKind};
use crate::syntax::{
    BinOp, CmpOp, Domain, Expr, Formula, Notion, Quantifier, Stmt, TransformerKind, VarDecl,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: unexpected character `{ch}`")]
    UnexpectedChar { ch: char, line: u32, col: u32 },
    #[error("{line}:{col}: integer literal out of range")]
    IntOutOfRange { line: u32, col: u32 },
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Unexpected {
        expected: String,
        found: String,
        line: u32,
        col: u32,
    },
    #[error("{line}:{col}: {message}")]
    Invalid { message: String, line: u32, col: u32 },
}

impl ParseError {
    pub fn position(&self) -> (u32, u32) {
        match *self {
            ParseError::UnexpectedChar { line, col, .. }
            | ParseError::IntOutOfRange { line, col }
            | ParseError::Unexpected { line, col, .. }
            | ParseError::Invalid { line, col, .. } => (line, col),
        }
    }
}

/// Whether a directive carries an `expect valid` / `expect invalid` claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Valid,
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecomposeKind {
    Correctness,
    Incorrectness,
}

/// A directive from a spec file, referencing a program by name.
#[derive(Debug, Clone, PartialEq)]
pub enum Directive {
    Check {
        notion: Notion,
        pre: Formula,
        program: String,
        post: Formula,
        expect: Option<Expectation>,
    },
    Query {
        transformer: TransformerKind,
        program: String,
        arg: Formula,
    },
    Park {
        transformer: TransformerKind,
        program: String,
        invariant: Formula,
        argument: Formula,
        expect: Option<Expectation>,
    },
    Variant {
        program: String,
        variant: Expr,
        expect: Option<Expectation>,
    },
    BackwardVariant {
        program: String,
        variant: Expr,
        expect: Option<Expectation>,
    },
    Decompose {
        kind: DecomposeKind,
        pre: Formula,
        program: String,
        post: Formula,
        expect: Option<Expectation>,
    },
}

impl Directive {
    pub fn program_name(&self) -> &str {
        match self {
            Directive::Check { program, .. }
            | Directive::Query { program, .. }
            | Directive::Park { program, .. }
            | Directive::Variant { program, .. }
            | Directive::BackwardVariant { program, .. }
            | Directive::Decompose { program, .. } => program,
        }
    }

    fn requires_loop(&self) -> bool {
        matches!(
            self,
            Directive::Park { .. } | Directive::Variant { .. } | Directive::BackwardVariant { .. }
        )
    }
}

/// A parsed and scope-checked spec file.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub decls: Vec<VarDecl>,
    pub programs: Vec<(String, Stmt)>,
    pub directives: Vec<Directive>,
}

impl SpecFile {
    pub fn program(&self, name: &str) -> Option<&Stmt> {
        self.programs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
    }
}

/// Parse a complete spec file and scope-check it.
pub fn parse_spec(text: &str) -> Result<SpecFile, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser::new(tokens);
    let spec = parser.parse_file()?;
    Ok(spec)
}

/// Parse a standalone formula (grammar only, no scope checks).
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser::new(tokens);
    let formula = parser.parse_formula()?;
    parser.expect_eof()?;
    Ok(formula)
}

/// Parse a standalone statement sequence (grammar only, no scope checks).
pub fn parse_stmt(text: &str) -> Result<Stmt, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser::new(tokens);
    let stmt = parser.parse_stmt_seq()?;
    parser.expect_eof()?;
    Ok(stmt)
}

/// Parse a standalone expression (grammar only, no scope checks).
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser::new(tokens);
    let expr = parser.parse_expr()?;
    parser.expect_eof()?;
    Ok(expr)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Parser {
        Parser { tokens, pos: 0 }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.peek().kind
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek_kind() == kind
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, ParseError> {
        let tok = self.peek();
        Err(ParseError::Unexpected {
            expected: expected.to_string(),
            found: tok.kind.to_string(),
            line: tok.line,
            col: tok.col,
        })
    }

    fn invalid<T>(&self, tok: &Token, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Invalid {
            message: message.into(),
            line: tok.line,
            col: tok.col,
        })
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, ParseError> {
        if self.at(&kind) {
            Ok(self.advance())
        } else {
            self.unexpected(what)
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.at(&TokenKind::Eof) {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Token), ParseError> {
        if let TokenKind::Ident(name) = self.peek_kind().clone() {
            let tok = self.advance();
            Ok((name, tok))
        } else {
            self.unexpected(what)
        }
    }

    /// An integer literal with optional leading minus.
    fn parse_int_lit(&mut self) -> Result<i64, ParseError> {
        let negative = self.eat(&TokenKind::Minus);
        if let TokenKind::Int(value) = *self.peek_kind() {
            self.advance();
            Ok(if negative { -value } else { value })
        } else {
            self.unexpected("an integer literal")
        }
    }

    // ------------------------------------------------------------------
    // Expressions
    // ------------------------------------------------------------------

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.parse_term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_factor()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Percent => BinOp::Mod,
                _ => break,
            };
            self.advance();
            let rhs = self.parse_factor()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek_kind().clone() {
            TokenKind::Int(value) => {
                self.advance();
                Ok(Expr::Const(value))
            }
            TokenKind::Minus => {
                self.advance();
                if let TokenKind::Int(value) = *self.peek_kind() {
                    self.advance();
                    Ok(Expr::Const(-value))
                } else {
                    self.unexpected("an integer literal after `-`")
                }
            }
            TokenKind::Ident(name) => {
                self.advance();
                Ok(Expr::Var(name))
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.parse_expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            _ => self.unexpected("an expression"),
        }
    }

    // ------------------------------------------------------------------
    // Formulas
    // ------------------------------------------------------------------

    fn parse_formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek_kind() {
            TokenKind::KwForall | TokenKind::KwExists => self.parse_quantifier(),
            _ => self.parse_implication(),
        }
    }

    fn parse_quantifier(&mut self) -> Result<Formula, ParseError> {
        let q = if self.eat(&TokenKind::KwForall) {
            Quantifier::Forall
        } else {
            self.expect(TokenKind::KwExists, "`forall` or `exists`")?;
            Quantifier::Exists
        };
        let (var, _) = self.expect_ident("a bound variable name")?;
        self.expect(TokenKind::KwIn, "`in`")?;
        let lo = self.parse_int_lit()?;
        self.expect(TokenKind::DotDot, "`..`")?;
        let hi = self.parse_int_lit()?;
        self.expect(TokenKind::Colon, "`:`")?;
        let body = self.parse_formula()?;
        Ok(Formula::Quant { q, var, lo, hi, body: Box::new(body) })
    }

    fn parse_implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_disjunction()?;
        if self.eat(&TokenKind::Arrow) {
            let rhs = self.parse_formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_conjunction()?;
        while self.eat(&TokenKind::OrOr) {
            let rhs = self.parse_conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_negation()?;
        while self.eat(&TokenKind::AndAnd) {
            let rhs = self.parse_negation()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_negation(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&TokenKind::Bang) {
            let operand = self.parse_negation_operand()?;
            Ok(Formula::not(operand))
        } else {
            self.parse_atom()
        }
    }

    /// The operand of `!` is restricted to atoms so `!x == 1` is rejected
    /// rather than being read surprisingly; write `!(x == 1)`.
    fn parse_negation_operand(&mut self) -> Result<Formula, ParseError> {
        match self.peek_kind().clone() {
            TokenKind::Bang => {
                self.advance();
                Ok(Formula::not(self.parse_negation_operand()?))
            }
            TokenKind::KwTrue => {
                self.advance();
                Ok(Formula::Bool(true))
            }
            TokenKind::KwFalse => {
                self.advance();
                Ok(Formula::Bool(false))
            }
            TokenKind::Ident(name) => {
                self.advance();
                Ok(Formula::Var(name))
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.parse_formula()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            _ => self.unexpected("an atom after `!` (parenthesize comparisons)"),
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek_kind() {
            TokenKind::KwTrue => {
                self.advance();
                Ok(Formula::Bool(true))
            }
            TokenKind::KwFalse => {
                self.advance();
                Ok(Formula::Bool(false))
            }
            TokenKind::LParen => {
                // `(` may open a parenthesized arithmetic expression or a
                // parenthesized formula; try the expression reading first
                // and rewind on failure.
                let save = self.pos;
                match self.parse_comparison_or_atom() {
                    Ok(f) => Ok(f),
                    Err(_) => {
                        self.pos = save;
                        self.advance();
                        let inner = self.parse_formula()?;
                        self.expect(TokenKind::RParen, "`)`")?;
                        Ok(inner)
                    }
                }
            }
            TokenKind::Ident(_) | TokenKind::Int(_) | TokenKind::Minus => {
                self.parse_comparison_or_atom()
            }
            _ => self.unexpected("a formula"),
        }
    }

    fn parse_comparison_or_atom(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_expr()?;
        let op = match self.peek_kind() {
            TokenKind::EqEq => Some(CmpOp::Eq),
            TokenKind::NotEq => Some(CmpOp::Ne),
            TokenKind::Less => Some(CmpOp::Lt),
            TokenKind::LessEq => Some(CmpOp::Le),
            TokenKind::Greater => Some(CmpOp::Gt),
            TokenKind::GreaterEq => Some(CmpOp::Ge),
            _ => None,
        };
        match op {
            Some(op) => {
                self.advance();
                let rhs = self.parse_expr()?;
                Ok(Formula::Cmp(op, lhs, rhs))
            }
            None => match lhs {
                Expr::Var(name) => Ok(Formula::Var(name)),
                _ => self.unexpected("a comparison operator"),
            },
        }
    }

    // ------------------------------------------------------------------
    // Statements
    // ------------------------------------------------------------------

    fn parse_stmt_seq(&mut self) -> Result<Stmt, ParseError> {
        let mut items = vec![self.parse_stmt_single()?];
        while self.eat(&TokenKind::Semi) {
            if self.at(&TokenKind::RBrace) || self.at(&TokenKind::Eof) {
                break;
            }
            items.push(self.parse_stmt_single()?);
        }
        let mut stmt = items.pop().expect("at least one statement");
        while let Some(prev) = items.pop() {
            stmt = Stmt::seq(prev, stmt);
        }
        Ok(stmt)
    }

    fn parse_stmt_single(&mut self) -> Result<Stmt, ParseError> {
        match self.peek_kind().clone() {
            TokenKind::KwDiverge => {
                self.advance();
                Ok(Stmt::Diverge)
            }
            TokenKind::KwSkip => {
                self.advance();
                Ok(Stmt::Skip)
            }
            TokenKind::Ident(name) => {
                self.advance();
                self.expect(TokenKind::Assign, "`:=`")?;
                let expr = self.parse_expr()?;
                Ok(Stmt::Assign(name, expr))
            }
            TokenKind::KwIf => {
                self.advance();
                self.expect(TokenKind::LParen, "`(`")?;
                let guard = self.parse_formula()?;
                self.expect(TokenKind::RParen, "`)`")?;
                self.expect(TokenKind::LBrace, "`{`")?;
                let then_branch = self.parse_stmt_seq()?;
                self.expect(TokenKind::RBrace, "`}`")?;
                self.expect(TokenKind::KwElse, "`else`")?;
                self.expect(TokenKind::LBrace, "`{`")?;
                let else_branch = self.parse_stmt_seq()?;
                self.expect(TokenKind::RBrace, "`}`")?;
                Ok(Stmt::ite(guard, then_branch, else_branch))
            }
            TokenKind::KwWhile => {
                self.advance();
                self.expect(TokenKind::LParen, "`(`")?;
                let guard = self.parse_formula()?;
                self.expect(TokenKind::RParen, "`)`")?;
                self.expect(TokenKind::LBrace, "`{`")?;
                let body = self.parse_stmt_seq()?;
                self.expect(TokenKind::RBrace, "`}`")?;
                Ok(Stmt::while_loop(guard, body))
            }
            TokenKind::LBrace => {
                self.advance();
                let inner = self.parse_stmt_seq()?;
                self.expect(TokenKind::RBrace, "`}`")?;
                Ok(inner)
            }
            _ => self.unexpected("a statement"),
        }
    }

    // ------------------------------------------------------------------
    // File items
    // ------------------------------------------------------------------

    fn parse_file(&mut self) -> Result<SpecFile, ParseError> {
        let mut decls: Vec<VarDecl> = Vec::new();
        let mut programs: Vec<(String, Stmt)> = Vec::new();
        let mut directives: Vec<Directive> = Vec::new();
        let mut item_positions: Vec<Token> = Vec::new();

        loop {
            match self.peek_kind() {
                TokenKind::Eof => break,
                TokenKind::KwVar => {
                    let tok = self.peek().clone();
                    let decl = self.parse_decl()?;
                    if decls.iter().any(|d| d.name == decl.name) {
                        return self
                            .invalid(&tok, format!("duplicate variable declaration `{}`", decl.name));
                    }
                    decls.push(decl);
                }
                TokenKind::KwProgram => {
                    let tok = self.peek().clone();
                    self.advance();
                    let (name, _) = self.expect_ident("a program name")?;
                    if programs.iter().any(|(n, _)| *n == name) {
                        return self.invalid(&tok, format!("duplicate program `{name}`"));
                    }
                    self.expect(TokenKind::LBrace, "`{`")?;
                    let body = self.parse_stmt_seq()?;
                    self.expect(TokenKind::RBrace, "`}`")?;
                    programs.push((name, body));
                }
                TokenKind::KwCheck
                | TokenKind::KwQuery
                | TokenKind::KwPark
                | TokenKind::KwVariant
                | TokenKind::KwBackwardVariant
                | TokenKind::KwDecompose => {
                    item_positions.push(self.peek().clone());
                    directives.push(self.parse_directive()?);
                }
                _ => return self.unexpected("a declaration, program or directive"),
            }
        }

        let spec = SpecFile { decls, programs, directives };
        validate(&spec, &item_positions)?;
        Ok(spec)
    }

    fn parse_decl(&mut self) -> Result<VarDecl, ParseError> {
        self.expect(TokenKind::KwVar, "`var`")?;
        let (name, _) = self.expect_ident("a variable name")?;
        self.expect(TokenKind::Colon, "`:`")?;
        let domain = match self.peek_kind() {
            TokenKind::KwBool => {
                self.advance();
                Domain::Bool
            }
            TokenKind::KwInt => {
                let tok = self.advance();
                self.expect(TokenKind::LBracket, "`[`")?;
                let lo = self.parse_int_lit()?;
                self.expect(TokenKind::DotDot, "`..`")?;
                let hi = self.parse_int_lit()?;
                self.expect(TokenKind::RBracket, "`]`")?;
                if lo > hi {
                    return self.invalid(&tok, format!("empty interval [{lo}..{hi}]"));
                }
                Domain::Int { lo, hi }
            }
            _ => return self.unexpected("`bool` or `int`"),
        };
        self.expect(TokenKind::Semi, "`;`")?;
        Ok(VarDecl { name, domain })
    }

    /// `{f}` for correctness positions; incorrectness directives also
    /// accept `[f]`.
    fn parse_delimited_formula(&mut self, brackets_ok: bool) -> Result<Formula, ParseError> {
        if brackets_ok && self.eat(&TokenKind::LBracket) {
            let f = self.parse_formula()?;
            self.expect(TokenKind::RBracket, "`]`")?;
            Ok(f)
        } else {
            self.expect(TokenKind::LBrace, "`{`")?;
            let f = self.parse_formula()?;
            self.expect(TokenKind::RBrace, "`}`")?;
            Ok(f)
        }
    }

    fn parse_expect(&mut self) -> Result<Option<Expectation>, ParseError> {
        if let TokenKind::Ident(word) = self.peek_kind() {
            if word == "expect" {
                self.advance();
                let (value, tok) = self.expect_ident("`valid` or `invalid`")?;
                return match value.as_str() {
                    "valid" => Ok(Some(Expectation::Valid)),
                    "invalid" => Ok(Some(Expectation::Invalid)),
                    other => self.invalid(&tok, format!("expected `valid` or `invalid`, found `{other}`")),
                };
            }
        }
        Ok(None)
    }

    fn parse_transformer(&mut self) -> Result<TransformerKind, ParseError> {
        let (word, tok) = self.expect_ident("a transformer (wp, wlp, sp or slp)")?;
        match word.as_str() {
            "wp" => Ok(TransformerKind::Wp),
            "wlp" => Ok(TransformerKind::Wlp),
            "sp" => Ok(TransformerKind::Sp),
            "slp" => Ok(TransformerKind::Slp),
            other => self.invalid(&tok, format!("unknown transformer `{other}`")),
        }
    }

    fn parse_directive(&mut self) -> Result<Directive, ParseError> {
        match self.peek_kind().clone() {
            TokenKind::KwCheck => {
                self.advance();
                let (word, tok) = self.expect_ident("a validity notion")?;
                let notion = match word.as_str() {
                    "total_correctness" => Notion::TotalCorrectness,
                    "partial_correctness" => Notion::PartialCorrectness,
                    "total_incorrectness" => Notion::TotalIncorrectness,
                    "partial_incorrectness" => Notion::PartialIncorrectness,
                    other => {
                        return self.invalid(&tok, format!("unknown validity notion `{other}`"))
                    }
                };
                let brackets = notion.is_incorrectness();
                let pre = self.parse_delimited_formula(brackets)?;
                let (program, _) = self.expect_ident("a program name")?;
                let post = self.parse_delimited_formula(brackets)?;
                let expect = self.parse_expect()?;
                self.expect(TokenKind::Semi, "`;`")?;
                Ok(Directive::Check { notion, pre, program, post, expect })
            }
            TokenKind::KwQuery => {
                self.advance();
                let transformer = self.parse_transformer()?;
                let (program, _) = self.expect_ident("a program name")?;
                let arg = self.parse_delimited_formula(false)?;
                self.expect(TokenKind::Semi, "`;`")?;
                Ok(Directive::Query { transformer, program, arg })
            }
            TokenKind::KwPark => {
                let tok = self.advance();
                let transformer = self.parse_transformer()?;
                if !matches!(transformer, TransformerKind::Wlp | TransformerKind::Slp) {
                    return self.invalid(
                        &tok,
                        "park induction applies to the liberal transformers wlp and slp",
                    );
                }
                let (program, _) = self.expect_ident("a program name")?;
                let invariant = self.parse_delimited_formula(false)?;
                let argument = self.parse_delimited_formula(false)?;
                let expect = self.parse_expect()?;
                self.expect(TokenKind::Semi, "`;`")?;
                Ok(Directive::Park { transformer, program, invariant, argument, expect })
            }
            TokenKind::KwVariant => {
                self.advance();
                let (program, _) = self.expect_ident("a program name")?;
                self.expect(TokenKind::LBrace, "`{`")?;
                let variant = self.parse_expr()?;
                self.expect(TokenKind::RBrace, "`}`")?;
                let expect = self.parse_expect()?;
                self.expect(TokenKind::Semi, "`;`")?;
                Ok(Directive::Variant { program, variant, expect })
            }
            TokenKind::KwBackwardVariant => {
                self.advance();
                let (program, _) = self.expect_ident("a program name")?;
                self.expect(TokenKind::LBrace, "`{`")?;
                let variant = self.parse_expr()?;
                self.expect(TokenKind::RBrace, "`}`")?;
                let expect = self.parse_expect()?;
                self.expect(TokenKind::Semi, "`;`")?;
                Ok(Directive::BackwardVariant { program, variant, expect })
            }
            TokenKind::KwDecompose => {
                self.advance();
                let (word, tok) = self.expect_ident("`correctness` or `incorrectness`")?;
                let kind = match word.as_str() {
                    "correctness" => DecomposeKind::Correctness,
                    "incorrectness" => DecomposeKind::Incorrectness,
                    other => {
                        return self
                            .invalid(&tok, format!("expected `correctness` or `incorrectness`, found `{other}`"))
                    }
                };
                let brackets = kind == DecomposeKind::Incorrectness;
                let pre = self.parse_delimited_formula(brackets)?;
                let (program, _) = self.expect_ident("a program name")?;
                let post = self.parse_delimited_formula(brackets)?;
                let expect = self.parse_expect()?;
                self.expect(TokenKind::Semi, "`;`")?;
                Ok(Directive::Decompose { kind, pre, program, post, expect })
            }
            _ => self.unexpected("a directive"),
        }
    }
}

// ----------------------------------------------------------------------
// Scope checking
// ----------------------------------------------------------------------

struct ScopeChecker<'a> {
    decls: &'a [VarDecl],
}

impl<'a> ScopeChecker<'a> {
    fn err<T>(&self, at: &Token, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Invalid {
            message: message.into(),
            line: at.line,
            col: at.col,
        })
    }

    fn lookup(&self, name: &str) -> Option<&VarDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    fn check_expr(&self, expr: &Expr, bound: &[String], at: &Token) -> Result<(), ParseError> {
        for name in expr.vars() {
            if !bound.contains(&name) && self.lookup(&name).is_none() {
                return self.err(at, format!("undeclared variable `{name}`"));
            }
        }
        Ok(())
    }

    fn check_formula(
        &self,
        formula: &Formula,
        bound: &mut Vec<String>,
        at: &Token,
    ) -> Result<(), ParseError> {
        match formula {
            Formula::Bool(_) => Ok(()),
            Formula::Var(name) => {
                if bound.iter().any(|b| b == name) {
                    return self.err(at, format!("bound variable `{name}` used as a boolean atom"));
                }
                match self.lookup(name) {
                    None => self.err(at, format!("undeclared variable `{name}`")),
                    Some(d) if d.domain != Domain::Bool => {
                        self.err(at, format!("variable `{name}` is not boolean"))
                    }
                    Some(_) => Ok(()),
                }
            }
            Formula::Cmp(_, lhs, rhs) => {
                self.check_expr(lhs, bound, at)?;
                self.check_expr(rhs, bound, at)
            }
            Formula::Not(inner) => self.check_formula(inner, bound, at),
            Formula::And(lhs, rhs) | Formula::Or(lhs, rhs) | Formula::Implies(lhs, rhs) => {
                self.check_formula(lhs, bound, at)?;
                self.check_formula(rhs, bound, at)
            }
            Formula::Quant { var, lo, hi, body, .. } => {
                if lo > hi {
                    return self.err(at, format!("empty quantifier range {lo}..{hi}"));
                }
                if (*hi as i128 - *lo as i128 + 1) > (1 << 20) {
                    return self.err(at, format!("quantifier range {lo}..{hi} is too large"));
                }
                if self.lookup(var).is_some() || bound.iter().any(|b| b == var) {
                    return self.err(
                        at,
                        format!("bound variable `{var}` shadows an existing name"),
                    );
                }
                bound.push(var.clone());
                let result = self.check_formula(body, bound, at);
                bound.pop();
                result
            }
        }
    }

    fn check_guard(&self, guard: &Formula, at: &Token) -> Result<(), ParseError> {
        if !guard.is_quantifier_free() {
            return self.err(at, "guards must be quantifier-free");
        }
        self.check_formula(guard, &mut Vec::new(), at)
    }

    fn check_stmt(&self, stmt: &Stmt, at: &Token) -> Result<(), ParseError> {
        match stmt {
            Stmt::Diverge | Stmt::Skip => Ok(()),
            Stmt::Assign(var, expr) => {
                if self.lookup(var).is_none() {
                    return self.err(at, format!("assignment to undeclared variable `{var}`"));
                }
                self.check_expr(expr, &[], at)
            }
            Stmt::Seq(first, second) => {
                self.check_stmt(first, at)?;
                self.check_stmt(second, at)
            }
            Stmt::Ite(guard, then_branch, else_branch) => {
                self.check_guard(guard, at)?;
                self.check_stmt(then_branch, at)?;
                self.check_stmt(else_branch, at)
            }
            Stmt::While(guard, body) => {
                self.check_guard(guard, at)?;
                self.check_stmt(body, at)
            }
        }
    }
}

fn validate(spec: &SpecFile, directive_positions: &[Token]) -> Result<(), ParseError> {
    let checker = ScopeChecker { decls: &spec.decls };
    let origin = Token { kind: TokenKind::Eof, line: 1, col: 1 };

    for (name, body) in &spec.programs {
        checker
            .check_stmt(body, &origin)
            .map_err(|e| relabel(e, &format!("in program `{name}`")))?;
    }

    for (directive, at) in spec.directives.iter().zip(directive_positions) {
        let program = directive.program_name();
        let Some(body) = spec.program(program) else {
            return checker.err(at, format!("directive references undefined program `{program}`"));
        };
        if directive.requires_loop() && !matches!(body, Stmt::While(..)) {
            return checker.err(
                at,
                format!("directive requires `{program}` to be a single while loop"),
            );
        }
        match directive {
            Directive::Check { pre, post, .. } | Directive::Decompose { pre, post, .. } => {
                checker.check_formula(pre, &mut Vec::new(), at)?;
                checker.check_formula(post, &mut Vec::new(), at)?;
            }
            Directive::Query { arg, .. } => {
                checker.check_formula(arg, &mut Vec::new(), at)?;
            }
            Directive::Park { invariant, argument, .. } => {
                checker.check_formula(invariant, &mut Vec::new(), at)?;
                checker.check_formula(argument, &mut Vec::new(), at)?;
            }
            Directive::Variant { variant, .. } | Directive::BackwardVariant { variant, .. } => {
                checker.check_expr(variant, &[], at)?;
            }
        }
    }
    Ok(())
}

fn relabel(err: ParseError, context: &str) -> ParseError {
    match err {
        ParseError::Invalid { message, line, col } => ParseError::Invalid {
            message: format!("{message} {context}"),
            line,
            col,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Stmt;

    #[test]
    fn minimal_file() {
        let spec = parse_spec(
            "var b : bool; program p { diverge } check partial_correctness {true} p {false};",
        )
        .unwrap();
        assert_eq!(spec.decls.len(), 1);
        assert_eq!(spec.programs.len(), 1);
        assert_eq!(spec.directives.len(), 1);
        assert!(matches!(
            spec.directives[0],
            Directive::Check { notion: Notion::PartialCorrectness, .. }
        ));
    }

    #[test]
    fn branching_program_shape() {
        let stmt = parse_stmt("if (x % 2 == 0) { y := y + 1 } else { y := 2 * y }").unwrap();
        match stmt {
            Stmt::Ite(guard, then_branch, else_branch) => {
                assert_eq!(guard.to_string(), "x % 2 == 0");
                assert!(matches!(*then_branch, Stmt::Assign(..)));
                assert!(matches!(*else_branch, Stmt::Assign(..)));
            }
            other => panic!("expected ite, got {other:?}"),
        }
    }

    #[test]
    fn loop_then_assignment_is_a_sequence() {
        let stmt = parse_stmt("while (!open) { dead := spill }; dead := spill").unwrap();
        match stmt {
            Stmt::Seq(first, second) => {
                assert!(matches!(*first, Stmt::While(..)));
                assert!(matches!(*second, Stmt::Assign(..)));
            }
            other => panic!("expected seq, got {other:?}"),
        }
    }

    #[test]
    fn formula_examples() {
        assert_eq!(parse_formula("y == 10").unwrap().to_string(), "y == 10");
        assert_eq!(
            parse_formula("forall a in 0..31: x != a + a").unwrap().to_string(),
            "forall a in 0..31: x != a + a"
        );
        assert_eq!(parse_formula("x % 2 == 0").unwrap().to_string(), "x % 2 == 0");
    }

    #[test]
    fn incorrectness_brackets() {
        let spec = parse_spec(
            "var y : int[0..3];\n\
             program p { y := y }\n\
             check partial_incorrectness [y == 1] p [y == 1] expect valid;",
        )
        .unwrap();
        assert!(matches!(
            spec.directives[0],
            Directive::Check { expect: Some(Expectation::Valid), .. }
        ));
    }

    #[test]
    fn rejections_carry_positions() {
        let err = parse_spec("var x : int[0..3];\nprogram p { x := $ }").unwrap_err();
        assert_eq!(err.position(), (2, 18));
        let err = parse_spec("var x : bool;\nvar x : bool;").unwrap_err();
        assert_eq!(err.position().0, 2);
        let err = parse_formula("x == ").unwrap_err();
        assert!(matches!(err, ParseError::Unexpected { .. }));
    }

    #[test]
    fn undeclared_variable_rejected() {
        let err = parse_spec("var x : bool; program p { y := 1 }").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("undeclared"), "{text}");
    }

    #[test]
    fn non_loop_program_rejected_for_variant() {
        let err = parse_spec(
            "var x : int[0..3];\n\
             program p { x := 1; x := 2 }\n\
             variant p { x };",
        )
        .unwrap_err();
        assert!(err.to_string().contains("single while loop"));
    }

    #[test]
    fn bound_variable_shadowing_rejected() {
        let err = parse_spec(
            "var x : int[0..3];\n\
             program p { x := x }\n\
             query wp p { forall x in 0..2: x == 0 };",
        )
        .unwrap_err();
        assert!(err.to_string().contains("shadows"));
    }

    #[test]
    fn non_boolean_atom_rejected() {
        let err = parse_spec(
            "var x : int[0..3];\nprogram p { x := x }\nquery wp p { x };",
        )
        .unwrap_err();
        assert!(err.to_string().contains("not boolean"));
    }

    #[test]
    fn parenthesized_expression_versus_formula() {
        assert_eq!(
            parse_formula("(x + 1) * 2 == 4").unwrap().to_string(),
            "(x + 1) * 2 == 4"
        );
        assert_eq!(
            parse_formula("(x == 1) && y == 2").unwrap().to_string(),
            "x == 1 && y == 2"
        );
        assert_eq!(parse_formula("((x == 1))").unwrap().to_string(), "x == 1");
    }

    #[test]
    fn trailing_semicolon_in_blocks() {
        let stmt = parse_stmt("{ x := 1; y := 2; }").unwrap();
        assert!(matches!(stmt, Stmt::Seq(..)));
    }

    #[test]
    fn trailing_garbage_rejected_not_truncated() {
        assert!(parse_formula("x == 1 y").is_err());
        assert!(parse_stmt("x := 1 }").is_err());
        assert!(parse_expr("1 + 2 3").is_err());
    }

    #[test]
    fn degenerate_ranges_rejected() {
        let err = parse_spec("var x : int[5..3];").unwrap_err();
        assert!(err.to_string().contains("empty interval"));
        let err = parse_spec(
            "var x : bool;\nprogram p { x := x }\nquery wp p { forall a in 3..1: a == a };",
        )
        .unwrap_err();
        assert!(err.to_string().contains("empty quantifier range"));
        let err = parse_spec(
            "var x : bool;\nprogram p { x := x }\nquery wp p { forall a in 0..2000000: a == a };",
        )
        .unwrap_err();
        assert!(err.to_string().contains("too large"));
    }

    #[test]
    fn all_directive_forms_parse() {
        let spec = parse_spec(
            "var x : int[0..4];\n\
             program loop { while (x < 3) { x := x + 1 } }\n\
             program straight { x := 0 }\n\
             check total_correctness {true} straight {x == 0};\n\
             query slp loop { x == 3 };\n\
             park wlp loop { true } { x == 3 } expect valid;\n\
             variant loop { 3 - x } expect invalid;\n\
             backward_variant loop { x } expect valid;\n\
             decompose correctness { true } straight { x == 0 };\n\
             decompose incorrectness [ x == 0 ] straight [ true ];",
        )
        .unwrap();
        assert_eq!(spec.directives.len(), 7);
    }

    #[test]
    fn park_requires_liberal_transformer() {
        let err = parse_spec(
            "var x : int[0..4];\n\
             program loop { while (x < 3) { x := x + 1 } }\n\
             park wp loop { true } { true };",
        )
        .unwrap_err();
        assert!(err.to_string().contains("liberal"));
    }
}
