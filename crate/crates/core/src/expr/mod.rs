//! Expression language for node definitions.
//!
//! ```text
//! expr    := or_expr | "if" expr "then" expr "else" expr
//! or_expr := and_expr { "or" and_expr }
//! and_expr:= cmp { "and" cmp }
//! cmp     := add [ ("=="|"!="|"<"|"<="|">"|">=") add ]
//! add     := mul { ("+"|"-") mul }
//! mul     := unary { ("*"|"/"|"%") unary }
//! unary   := ["-"|"not"] atom
//! atom    := literal | ident | ident "(" [expr {"," expr}] ")"
//!          | "[" [expr {"," expr}] "]" | "(" expr ")"
//! ```

mod ast;
mod eval;
mod lexer;
mod parser;

#[cfg(test)]
pub(crate) mod testing;

pub use ast::{pretty_print, BinaryOp, Expr, ExprKind, UnaryOp};
pub use eval::{eval, Bindings, EvalEnv, EvalError};
pub use lexer::{is_identifier, tokenize, LexError, Span, Token, TokenKind, KEYWORDS};
pub use parser::{parse, parse_expr, ParseError, SyntaxError};
