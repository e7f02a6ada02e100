//! Tokeniser for `.wsl` program files and `.wsd` derivation scripts.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    // Punctuation and operators.
    LAngle,    // <
    RAngle,    // >
    Le,        // <=
    Ge,        // >=
    Eq,        // =
    Ne,        // !=
    Iff,       // <=>
    Implies,   // =>
    Arrow,     // ->
    LBrace,    // {
    RBrace,    // }
    LParen,    // (
    RParen,    // )
    LBracket,  // [
    RBracket,  // ]
    Bar,       // |
    Comma,     // ,
    Dot,       // .
    DotDot,    // ..
    Semi,      // ;
    AndOp,     // /\
    OrOp,      // \/
    Plus,      // +
    Minus,     // -
    Star,      // *
    Slash,     // /
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{}", s),
            Tok::Int(n) => write!(f, "{}", n),
            Tok::LAngle => write!(f, "<"),
            Tok::RAngle => write!(f, ">"),
            Tok::Le => write!(f, "<="),
            Tok::Ge => write!(f, ">="),
            Tok::Eq => write!(f, "="),
            Tok::Ne => write!(f, "!="),
            Tok::Iff => write!(f, "<=>"),
            Tok::Implies => write!(f, "=>"),
            Tok::Arrow => write!(f, "->"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::Bar => write!(f, "|"),
            Tok::Comma => write!(f, ","),
            Tok::Dot => write!(f, "."),
            Tok::DotDot => write!(f, ".."),
            Tok::Semi => write!(f, ";"),
            Tok::AndOp => write!(f, "/\\"),
            Tok::OrOp => write!(f, "\\/"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    macro_rules! push {
        ($tok:expr, $len:expr) => {{
            out.push(Token {
                tok: $tok,
                line,
                col,
            });
            i += $len;
            col += $len;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let c1 = chars.get(i + 1).copied();
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
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '<' => {
                if c1 == Some('=') && chars.get(i + 2) == Some(&'>') {
                    push!(Tok::Iff, 3)
                } else if c1 == Some('=') {
                    push!(Tok::Le, 2)
                } else {
                    push!(Tok::LAngle, 1)
                }
            }
            '>' => {
                if c1 == Some('=') {
                    push!(Tok::Ge, 2)
                } else {
                    push!(Tok::RAngle, 1)
                }
            }
            '=' => {
                if c1 == Some('>') {
                    push!(Tok::Implies, 2)
                } else {
                    push!(Tok::Eq, 1)
                }
            }
            '!' => {
                if c1 == Some('=') {
                    push!(Tok::Ne, 2)
                } else {
                    return Err(LexError {
                        line,
                        col,
                        msg: "unexpected `!`".into(),
                    });
                }
            }
            '-' => {
                if c1 == Some('>') {
                    push!(Tok::Arrow, 2)
                } else {
                    push!(Tok::Minus, 1)
                }
            }
            '/' => {
                if c1 == Some('\\') {
                    push!(Tok::AndOp, 2)
                } else {
                    push!(Tok::Slash, 1)
                }
            }
            '\\' => {
                if c1 == Some('/') {
                    push!(Tok::OrOp, 2)
                } else {
                    return Err(LexError {
                        line,
                        col,
                        msg: "unexpected `\\`".into(),
                    });
                }
            }
            '.' => {
                if c1 == Some('.') {
                    push!(Tok::DotDot, 2)
                } else {
                    push!(Tok::Dot, 1)
                }
            }
            '{' => push!(Tok::LBrace, 1),
            '}' => push!(Tok::RBrace, 1),
            '(' => push!(Tok::LParen, 1),
            ')' => push!(Tok::RParen, 1),
            '[' => push!(Tok::LBracket, 1),
            ']' => push!(Tok::RBracket, 1),
            '|' => push!(Tok::Bar, 1),
            ',' => push!(Tok::Comma, 1),
            ';' => push!(Tok::Semi, 1),
            '+' => push!(Tok::Plus, 1),
            '*' => push!(Tok::Star, 1),
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n: i64 = text.parse().map_err(|_| LexError {
                    line,
                    col,
                    msg: format!("integer literal `{}` out of range", text),
                })?;
                out.push(Token {
                    tok: Tok::Int(n),
                    line,
                    col,
                });
                col += i - start;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Token {
                    tok: Tok::Ident(text),
                    line,
                    col,
                });
                col += i - start;
            }
            _ => {
                return Err(LexError {
                    line,
                    col,
                    msg: format!("unexpected character `{}`", c),
                });
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
