//! Tokenizer for spec files. Tracks 1-based line/column positions so every
//! diagnostic can point at its source location.

use crate::parser::ParseError;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    // Keywords.
    KwVar,
    KwProgram,
    KwCheck,
    KwQuery,
    KwPark,
    KwVariant,
    KwBackwardVariant,
    KwDecompose,
    KwWhile,
    KwIf,
    KwElse,
    KwDiverge,
    KwSkip,
    KwTrue,
    KwFalse,
    KwForall,
    KwExists,
    KwIn,
    KwBool,
    KwInt,
    // Punctuation and operators.
    Assign, // :=
    Semi,
    Colon,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    DotDot,
    EqEq,
    NotEq,
    LessEq,
    GreaterEq,
    Less,
    Greater,
    AndAnd,
    OrOr,
    Arrow, // ->
    Bang,
    Plus,
    Minus,
    Star,
    Percent,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Ident(name) => return write!(f, "`{name}`"),
            TokenKind::Int(n) => return write!(f, "`{n}`"),
            TokenKind::KwVar => "`var`",
            TokenKind::KwProgram => "`program`",
            TokenKind::KwCheck => "`check`",
            TokenKind::KwQuery => "`query`",
            TokenKind::KwPark => "`park`",
            TokenKind::KwVariant => "`variant`",
            TokenKind::KwBackwardVariant => "`backward_variant`",
            TokenKind::KwDecompose => "`decompose`",
            TokenKind::KwWhile => "`while`",
            TokenKind::KwIf => "`if`",
            TokenKind::KwElse => "`else`",
            TokenKind::KwDiverge => "`diverge`",
            TokenKind::KwSkip => "`skip`",
            TokenKind::KwTrue => "`true`",
            TokenKind::KwFalse => "`false`",
            TokenKind::KwForall => "`forall`",
            TokenKind::KwExists => "`exists`",
            TokenKind::KwIn => "`in`",
            TokenKind::KwBool => "`bool`",
            TokenKind::KwInt => "`int`",
            TokenKind::Assign => "`:=`",
            TokenKind::Semi => "`;`",
            TokenKind::Colon => "`:`",
            TokenKind::LBrace => "`{`",
            TokenKind::RBrace => "`}`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::LBracket => "`[`",
            TokenKind::RBracket => "`]`",
            TokenKind::DotDot => "`..`",
            TokenKind::EqEq => "`==`",
            TokenKind::NotEq => "`!=`",
            TokenKind::LessEq => "`<=`",
            TokenKind::GreaterEq => "`>=`",
            TokenKind::Less => "`<`",
            TokenKind::Greater => "`>`",
            TokenKind::AndAnd => "`&&`",
            TokenKind::OrOr => "`||`",
            TokenKind::Arrow => "`->`",
            TokenKind::Bang => "`!`",
            TokenKind::Plus => "`+`",
            TokenKind::Minus => "`-`",
            TokenKind::Star => "`*`",
            TokenKind::Percent => "`%`",
            TokenKind::Eof => "end of input",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub col: u32,
}

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "var" => TokenKind::KwVar,
        "program" => TokenKind::KwProgram,
        "check" => TokenKind::KwCheck,
        "query" => TokenKind::KwQuery,
        "park" => TokenKind::KwPark,
        "variant" => TokenKind::KwVariant,
        "backward_variant" => TokenKind::KwBackwardVariant,
        "decompose" => TokenKind::KwDecompose,
        "while" => TokenKind::KwWhile,
        "if" => TokenKind::KwIf,
        "else" => TokenKind::KwElse,
        "diverge" => TokenKind::KwDiverge,
        "skip" => TokenKind::KwSkip,
        "true" => TokenKind::KwTrue,
        "false" => TokenKind::KwFalse,
        "forall" => TokenKind::KwForall,
        "exists" => TokenKind::KwExists,
        "in" => TokenKind::KwIn,
        "bool" => TokenKind::KwBool,
        "int" => TokenKind::KwInt,
        _ => return None,
    })
}

/// Tokenize source text. `//` starts a line comment.
pub fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! push {
        ($kind:expr, $len:expr) => {{
            tokens.push(Token { kind: $kind, line, col });
            i += $len;
            col += $len as u32;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '/' if next == Some('/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            ':' if next == Some('=') => push!(TokenKind::Assign, 2),
            ':' => push!(TokenKind::Colon, 1),
            ';' => push!(TokenKind::Semi, 1),
            '{' => push!(TokenKind::LBrace, 1),
            '}' => push!(TokenKind::RBrace, 1),
            '(' => push!(TokenKind::LParen, 1),
            ')' => push!(TokenKind::RParen, 1),
            '[' => push!(TokenKind::LBracket, 1),
            ']' => push!(TokenKind::RBracket, 1),
            '.' if next == Some('.') => push!(TokenKind::DotDot, 2),
            '=' if next == Some('=') => push!(TokenKind::EqEq, 2),
            '!' if next == Some('=') => push!(TokenKind::NotEq, 2),
            '!' => push!(TokenKind::Bang, 1),
            '<' if next == Some('=') => push!(TokenKind::LessEq, 2),
            '<' => push!(TokenKind::Less, 1),
            '>' if next == Some('=') => push!(TokenKind::GreaterEq, 2),
            '>' => push!(TokenKind::Greater, 1),
            '&' if next == Some('&') => push!(TokenKind::AndAnd, 2),
            '|' if next == Some('|') => push!(TokenKind::OrOr, 2),
            '-' if next == Some('>') => push!(TokenKind::Arrow, 2),
            '-' => push!(TokenKind::Minus, 1),
            '+' => push!(TokenKind::Plus, 1),
            '*' => push!(TokenKind::Star, 1),
            '%' => push!(TokenKind::Percent, 1),
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let value: i64 = text.parse().map_err(|_| ParseError::IntOutOfRange {
                    line,
                    col,
                })?;
                tokens.push(Token { kind: TokenKind::Int(value), line, col });
                col += (i - start) as u32;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let kind = keyword(&word).unwrap_or(TokenKind::Ident(word));
                tokens.push(Token { kind, line, col });
                col += (i - start) as u32;
            }
            other => {
                return Err(ParseError::UnexpectedChar { ch: other, line, col });
            }
        }
    }
    tokens.push(Token { kind: TokenKind::Eof, line, col });
    Ok(tokens)
}
