use std::fmt;

use thiserror::Error;

/// Byte range `[start, end)` in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Int,
    Float,
    Str,
    Punct,
    Operator,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text; for string literals, the unescaped contents.
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_keyword(&self, word: &str) -> bool {
        self.kind == TokenKind::Ident && self.text == word
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lex error at {span}: {message}")]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

/// Words with grammatical meaning; not usable as node names.
pub const KEYWORDS: &[&str] = &["and", "or", "not", "if", "then", "else", "true", "false"];

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;

    while pos < bytes.len() {
        let c = bytes[pos];
        let start = pos;
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            tokens.push(token(TokenKind::Ident, &src[start..pos], start, pos));
            continue;
        }
        if c.is_ascii_digit() {
            pos = lex_number(src, start, &mut tokens)?;
            continue;
        }
        if c == b'"' {
            pos = lex_string(src, start, &mut tokens)?;
            continue;
        }
        let two = src.get(pos..pos + 2);
        if let Some(op @ ("==" | "!=" | "<=" | ">=")) = two {
            tokens.push(token(TokenKind::Operator, op, start, start + 2));
            pos += 2;
            continue;
        }
        let kind = match c {
            b'(' | b')' | b'[' | b']' | b',' => TokenKind::Punct,
            b'+' | b'-' | b'*' | b'/' | b'%' | b'<' | b'>' => TokenKind::Operator,
            _ => {
                let ch = src[pos..].chars().next().unwrap_or('\u{fffd}');
                return Err(LexError {
                    span: Span::new(start, start + ch.len_utf8()),
                    message: format!("unexpected character {ch:?}"),
                });
            }
        };
        tokens.push(token(kind, &src[start..start + 1], start, start + 1));
        pos += 1;
    }

    tokens.push(token(TokenKind::Eof, "", src.len(), src.len()));
    Ok(tokens)
}

fn token(kind: TokenKind, text: &str, start: usize, end: usize) -> Token {
    Token {
        kind,
        text: text.to_string(),
        span: Span::new(start, end),
    }
}

fn lex_number(src: &str, start: usize, tokens: &mut Vec<Token>) -> Result<usize, LexError> {
    let bytes = src.as_bytes();
    let digits = |mut p: usize| {
        while p < bytes.len() && bytes[p].is_ascii_digit() {
            p += 1;
        }
        p
    };
    let mut pos = digits(start);
    let mut is_float = false;
    if pos + 1 < bytes.len() && bytes[pos] == b'.' && bytes[pos + 1].is_ascii_digit() {
        pos = digits(pos + 1);
        is_float = true;
    }
    if pos < bytes.len() && matches!(bytes[pos], b'e' | b'E') {
        let mut p = pos + 1;
        if p < bytes.len() && matches!(bytes[p], b'+' | b'-') {
            p += 1;
        }
        if p < bytes.len() && bytes[p].is_ascii_digit() {
            pos = digits(p);
            is_float = true;
        }
    }
    if pos < bytes.len() && (bytes[pos].is_ascii_alphabetic() || bytes[pos] == b'_') {
        return Err(LexError {
            span: Span::new(start, pos + 1),
            message: "malformed number".to_string(),
        });
    }
    let text = &src[start..pos];
    if is_float {
        match text.parse::<f64>() {
            Ok(x) if x.is_finite() => {}
            _ => {
                return Err(LexError {
                    span: Span::new(start, pos),
                    message: format!("float literal {text} out of range"),
                })
            }
        }
        tokens.push(token(TokenKind::Float, text, start, pos));
    } else {
        if text.parse::<i64>().is_err() {
            return Err(LexError {
                span: Span::new(start, pos),
                message: format!("integer literal {text} out of 64-bit range"),
            });
        }
        tokens.push(token(TokenKind::Int, text, start, pos));
    }
    Ok(pos)
}

fn lex_string(src: &str, start: usize, tokens: &mut Vec<Token>) -> Result<usize, LexError> {
    let mut value = String::new();
    let mut chars = src[start + 1..].char_indices();
    while let Some((offset, ch)) = chars.next() {
        let at = start + 1 + offset;
        match ch {
            '"' => {
                tokens.push(Token {
                    kind: TokenKind::Str,
                    text: value,
                    span: Span::new(start, at + 1),
                });
                return Ok(at + 1);
            }
            '\\' => match chars.next() {
                Some((_, c @ ('"' | '\\'))) => value.push(c),
                Some((o, c)) => {
                    let esc = start + 1 + o;
                    return Err(LexError {
                        span: Span::new(at, esc + c.len_utf8()),
                        message: format!("unsupported escape \\{c}"),
                    });
                }
                None => break,
            },
            c => value.push(c),
        }
    }
    Err(LexError {
        span: Span::new(start, src.len()),
        message: "unterminated string literal".to_string(),
    })
}
