//! Recursive-descent parser for node expressions.

use thiserror::Error;

use super::ast::{BinaryOp, Expr, ExprKind, UnaryOp};
use super::lexer::{tokenize, LexError, Span, Token, TokenKind};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {span}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub span: Span,
    pub expected: Vec<String>,
    pub found: String,
}

/// Lexing or parsing failure for one expression string.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl SyntaxError {
    pub fn span(&self) -> Span {
        match self {
            SyntaxError::Lex(e) => e.span,
            SyntaxError::Parse(e) => e.span,
        }
    }
}

/// Tokenize and parse in one step.
pub fn parse(src: &str) -> Result<Expr, SyntaxError> {
    let tokens = tokenize(src)?;
    Ok(parse_expr(&tokens)?)
}

pub fn parse_expr(tokens: &[Token]) -> Result<Expr, ParseError> {
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expr()?;
    let tok = parser.peek();
    if tok.kind != TokenKind::Eof {
        return Err(parser.unexpected(&["end of input"]));
    }
    Ok(expr)
}

// Operand nesting beyond this is rejected instead of overflowing the stack.
const MAX_DEPTH: usize = 64;

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        // A well-formed token list ends in Eof; never step past it.
        &self.tokens[self.pos.min(self.tokens.len().saturating_sub(1))]
    }

    fn bump(&mut self) -> &'t Token {
        let tok = self.peek();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, kind: TokenKind, text: &str) -> bool {
        if self.peek().is(kind, text) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, text: &str) -> Result<&'t Token, ParseError> {
        if self.peek().is(kind, text) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[&format!("\"{text}\"")]))
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let tok = self.peek();
        let found = match tok.kind {
            TokenKind::Eof => "end of input".to_string(),
            TokenKind::Str => format!("string {:?}", tok.text),
            _ => format!("\"{}\"", tok.text),
        };
        ParseError {
            span: tok.span,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn depth_guard(&self, depth: usize) -> Result<(), ParseError> {
        if depth > MAX_DEPTH {
            let mut err = self.unexpected(&["shallower nesting"]);
            err.found = format!("nesting deeper than {MAX_DEPTH}");
            return Err(err);
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.expr_at(0)
    }

    fn expr_at(&mut self, depth: usize) -> Result<Expr, ParseError> {
        self.depth_guard(depth)?;
        if self.peek().is_keyword("if") {
            let start = self.bump().span;
            let cond = self.expr_at(depth + 1)?;
            if !self.peek().is_keyword("then") {
                return Err(self.unexpected(&["\"then\""]));
            }
            self.bump();
            let then = self.expr_at(depth + 1)?;
            if !self.peek().is_keyword("else") {
                return Err(self.unexpected(&["\"else\""]));
            }
            self.bump();
            let otherwise = self.expr_at(depth + 1)?;
            let span = start.to(otherwise.span);
            return Ok(Expr::new(
                ExprKind::IfElse(Box::new(cond), Box::new(then), Box::new(otherwise)),
                span,
            ));
        }
        self.or_expr(depth)
    }

    fn or_expr(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let mut lhs = self.and_expr(depth)?;
        while self.peek().is_keyword("or") {
            self.bump();
            let rhs = self.and_expr(depth)?;
            lhs = binary(BinaryOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let mut lhs = self.comparison(depth)?;
        while self.peek().is_keyword("and") {
            self.bump();
            let rhs = self.comparison(depth)?;
            lhs = binary(BinaryOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn comparison(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let lhs = self.additive(depth)?;
        let tok = self.peek();
        let op = match (tok.kind, tok.text.as_str()) {
            (TokenKind::Operator, "==") => BinaryOp::Eq,
            (TokenKind::Operator, "!=") => BinaryOp::Ne,
            (TokenKind::Operator, "<") => BinaryOp::Lt,
            (TokenKind::Operator, "<=") => BinaryOp::Le,
            (TokenKind::Operator, ">") => BinaryOp::Gt,
            (TokenKind::Operator, ">=") => BinaryOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive(depth)?;
        Ok(binary(op, lhs, rhs))
    }

    fn additive(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative(depth)?;
        loop {
            let op = if self.eat(TokenKind::Operator, "+") {
                BinaryOp::Add
            } else if self.eat(TokenKind::Operator, "-") {
                BinaryOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.multiplicative(depth)?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let mut lhs = self.unary(depth)?;
        loop {
            let op = if self.eat(TokenKind::Operator, "*") {
                BinaryOp::Mul
            } else if self.eat(TokenKind::Operator, "/") {
                BinaryOp::Div
            } else if self.eat(TokenKind::Operator, "%") {
                BinaryOp::Rem
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary(depth)?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let op = if self.peek().is(TokenKind::Operator, "-") {
            Some(UnaryOp::Neg)
        } else if self.peek().is_keyword("not") {
            Some(UnaryOp::Not)
        } else {
            None
        };
        match op {
            Some(op) => {
                let start = self.bump().span;
                let operand = self.atom(depth)?;
                let span = start.to(operand.span);
                Ok(Expr::new(ExprKind::Unary(op, Box::new(operand)), span))
            }
            None => self.atom(depth),
        }
    }

    fn atom(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let tok = self.peek();
        match tok.kind {
            TokenKind::Int => {
                self.bump();
                let value = tok.text.parse::<i64>().map_err(|_| self.unexpected(&["integer"]))?;
                Ok(Expr::new(ExprKind::Lit(Value::Int(value)), tok.span))
            }
            TokenKind::Float => {
                self.bump();
                let value = tok.text.parse::<f64>().map_err(|_| self.unexpected(&["number"]))?;
                Ok(Expr::new(ExprKind::Lit(Value::Float(value)), tok.span))
            }
            TokenKind::Str => {
                self.bump();
                Ok(Expr::new(ExprKind::Lit(Value::Str(tok.text.clone())), tok.span))
            }
            TokenKind::Ident => match tok.text.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(Expr::new(ExprKind::Lit(Value::Bool(tok.text == "true")), tok.span))
                }
                "and" | "or" | "not" | "if" | "then" | "else" => Err(self.unexpected(&[
                    "literal",
                    "identifier",
                    "\"(\"",
                    "\"[\"",
                ])),
                _ => {
                    self.bump();
                    if self.peek().is(TokenKind::Punct, "(") {
                        self.bump();
                        let (args, end) = self.sequence(")", depth)?;
                        Ok(Expr::new(
                            ExprKind::Call(tok.text.clone(), args),
                            tok.span.to(end),
                        ))
                    } else {
                        Ok(Expr::new(ExprKind::Ref(tok.text.clone()), tok.span))
                    }
                }
            },
            TokenKind::Punct if tok.text == "[" => {
                self.bump();
                let (items, end) = self.sequence("]", depth)?;
                Ok(Expr::new(ExprKind::ListLit(items), tok.span.to(end)))
            }
            TokenKind::Punct if tok.text == "(" => {
                self.bump();
                let inner = self.expr_at(depth + 1)?;
                let close = self.expect(TokenKind::Punct, ")")?;
                Ok(Expr::new(inner.kind, tok.span.to(close.span)))
            }
            _ => Err(self.unexpected(&["literal", "identifier", "\"(\"", "\"[\""])),
        }
    }

    /// Comma-separated expressions up to `close`, which is consumed.
    fn sequence(&mut self, close: &str, depth: usize) -> Result<(Vec<Expr>, Span), ParseError> {
        let mut items = Vec::new();
        if let Some(end) = self.close(close) {
            return Ok((items, end));
        }
        loop {
            items.push(self.expr_at(depth + 1)?);
            if let Some(end) = self.close(close) {
                return Ok((items, end));
            }
            if !self.eat(TokenKind::Punct, ",") {
                return Err(self.unexpected(&["\",\"", &format!("\"{close}\"")]));
            }
        }
    }

    fn close(&mut self, close: &str) -> Option<Span> {
        if self.peek().is(TokenKind::Punct, close) {
            Some(self.bump().span)
        } else {
            None
        }
    }
}

fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = lhs.span.to(rhs.span);
    Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ast::pretty_print;
    use crate::expr::testing::arb_expr;
    use proptest::prelude::*;

    fn int(i: i64) -> Expr {
        Expr::lit(Value::Int(i))
    }

    #[test]
    fn call_with_ref() {
        let e = parse("binomial(1, U1)").unwrap();
        assert_eq!(e, Expr::call("binomial", vec![int(1), Expr::reference("U1")]));
    }

    #[test]
    fn single_literal() {
        assert_eq!(parse("1").unwrap(), int(1));
        assert_eq!(parse("true").unwrap(), Expr::lit(Value::Bool(true)));
    }

    #[test]
    fn nested_arithmetic_argument() {
        let expected = Expr::call(
            "binomial",
            vec![
                int(1),
                Expr::binary(BinaryOp::Sub, int(1), Expr::reference("U1")),
            ],
        );
        let e = parse("binomial(1, 1 - U1)").unwrap();
        assert_eq!(e, expected);
        // Printing the hand-built tree and reading it back lands on the same tree.
        assert_eq!(parse(&pretty_print(&expected)).unwrap(), expected);
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse("a - b - c * d").unwrap();
        let ab = Expr::binary(BinaryOp::Sub, Expr::reference("a"), Expr::reference("b"));
        let cd = Expr::binary(BinaryOp::Mul, Expr::reference("c"), Expr::reference("d"));
        assert_eq!(e, Expr::binary(BinaryOp::Sub, ab, cd));

        let e = parse("x > 1 or y < 2 and z == 3").unwrap();
        match &e.kind {
            ExprKind::Binary(BinaryOp::Or, _, rhs) => {
                assert!(matches!(rhs.kind, ExprKind::Binary(BinaryOp::And, _, _)))
            }
            other => panic!("unexpected tree {other:?}"),
        }
    }

    #[test]
    fn if_then_else() {
        let e = parse("if X > 0 then Y else Z").unwrap();
        assert!(matches!(e.kind, ExprKind::IfElse(..)));
        assert_eq!(e.free_refs().into_iter().collect::<Vec<_>>(), ["X", "Y", "Z"]);
    }

    #[test]
    fn literal_strings_are_not_refs() {
        let e = parse("sigmoid_binomial(C, H, \"H\")").unwrap();
        assert_eq!(e.free_refs().into_iter().collect::<Vec<_>>(), ["C", "H"]);
        assert!(parse("uniform(0,1)").unwrap().free_refs().is_empty());
    }

    #[test]
    fn refs_keep_first_mention_order() {
        let e = parse("f(Z, A, Z, B)").unwrap();
        assert_eq!(e.refs_in_order(), ["Z", "A", "B"]);
    }

    #[test]
    fn malformed_inputs() {
        for src in [
            "binomial(1, \"H\"",
            "",
            "1 +",
            "a < b < c",
            "--1",
            "f(,)",
            "[1 2]",
            "if a then b",
            "(1",
            "1)",
            "and",
        ] {
            let err = parse(src).unwrap_err();
            assert!(matches!(err, SyntaxError::Parse(_)), "{src}: {err}");
        }
        let err = parse("binomial(1, \"H\"").unwrap_err();
        assert_eq!(err.span(), Span::new(15, 15));
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = format!("{}1{}", "(".repeat(5000), ")".repeat(5000));
        assert!(parse(&src).is_err());
        let src = format!("{}1{}", "f(".repeat(60), ")".repeat(60));
        assert!(parse(&src).is_ok());
    }

    #[test]
    fn spans_cover_subexpressions() {
        let e = parse("foo(1, bar)").unwrap();
        assert_eq!(e.span, Span::new(0, 11));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        #[test]
        fn pretty_print_round_trips(e in arb_expr()) {
            let text = pretty_print(&e);
            let back = parse(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
            prop_assert_eq!(back, e, "{}", text);
        }

        #[test]
        fn string_contents_never_become_refs(name in "[A-Za-z_][A-Za-z0-9_]{0,5}") {
            let e = parse(&format!("f(\"{name}\")")).unwrap();
            prop_assert!(e.free_refs().is_empty());
        }
    }
}
