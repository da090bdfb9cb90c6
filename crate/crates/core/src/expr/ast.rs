use std::collections::BTreeSet;
use std::fmt;

use super::lexer::Span;
use crate::value::{format_float, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
        }
    }
}

/// Expression tree. Equality ignores spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Lit(Value),
    Ref(String),
    Call(String, Vec<Expr>),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    IfElse(Box<Expr>, Box<Expr>, Box<Expr>),
    ListLit(Vec<Expr>),
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

// Literals compare by kind as well as value: `1` and `1.0` are different trees.
impl PartialEq for ExprKind {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (self, other) {
            (Lit(a), Lit(b)) => a.type_name() == b.type_name() && a == b,
            (Ref(a), Ref(b)) => a == b,
            (Call(f, xs), Call(g, ys)) => f == g && xs == ys,
            (Unary(o, x), Unary(p, y)) => o == p && x == y,
            (Binary(o, a, b), Binary(p, c, d)) => o == p && a == c && b == d,
            (IfElse(a, b, c), IfElse(d, e, f)) => a == d && b == e && c == f,
            (ListLit(xs), ListLit(ys)) => xs == ys,
            _ => false,
        }
    }
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Expression without source position, for trees built in code.
    pub fn synthetic(kind: ExprKind) -> Self {
        Expr::new(kind, Span::default())
    }

    pub fn lit(v: Value) -> Self {
        Expr::synthetic(ExprKind::Lit(v))
    }

    pub fn reference(name: &str) -> Self {
        Expr::synthetic(ExprKind::Ref(name.to_string()))
    }

    pub fn call(name: &str, args: Vec<Expr>) -> Self {
        Expr::synthetic(ExprKind::Call(name.to_string(), args))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::synthetic(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    /// Names referenced anywhere in the expression.
    pub fn free_refs(&self) -> BTreeSet<String> {
        self.refs_in_order().into_iter().collect()
    }

    /// Referenced names, deduplicated, in order of first mention.
    pub fn refs_in_order(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk_ref(&mut |e| {
            if let ExprKind::Ref(name) = &e.kind {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
        });
        out
    }

    /// Every `Call` node as `(name, argument count, span)`, in source order.
    pub fn calls(&self) -> Vec<(&str, usize, Span)> {
        let mut out = Vec::new();
        self.walk_ref(&mut |e| {
            if let ExprKind::Call(name, args) = &e.kind {
                out.push((name.as_str(), args.len(), e.span));
            }
        });
        out
    }

    fn walk_ref<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for child in self.children() {
            child.walk_ref(f);
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Lit(_) | ExprKind::Ref(_) => vec![],
            ExprKind::Call(_, args) | ExprKind::ListLit(args) => args.iter().collect(),
            ExprKind::Unary(_, e) => vec![e],
            ExprKind::Binary(_, l, r) => vec![l, r],
            ExprKind::IfElse(c, t, e) => vec![c, t, e],
        }
    }

    fn is_atom(&self) -> bool {
        match &self.kind {
            ExprKind::Lit(v) => !matches!(v, Value::Int(i) if *i < 0)
                && !matches!(v, Value::Float(x) if x.is_sign_negative()),
            ExprKind::Ref(_) | ExprKind::Call(..) | ExprKind::ListLit(_) => true,
            _ => false,
        }
    }
}

/// Source text that parses back to an equal tree. Every non-atomic operand
/// is parenthesized, so precedence never needs to be reconstructed.
pub fn pretty_print(e: &Expr) -> String {
    let mut out = String::new();
    print_into(e, &mut out);
    out
}

fn print_operand(e: &Expr, out: &mut String) {
    if e.is_atom() {
        print_into(e, out);
    } else {
        out.push('(');
        print_into(e, out);
        out.push(')');
    }
}

fn print_into(e: &Expr, out: &mut String) {
    match &e.kind {
        ExprKind::Lit(v) => print_literal(v, out),
        ExprKind::Ref(name) => out.push_str(name),
        ExprKind::Call(name, args) => {
            out.push_str(name);
            out.push('(');
            print_list(args, out);
            out.push(')');
        }
        ExprKind::ListLit(items) => {
            out.push('[');
            print_list(items, out);
            out.push(']');
        }
        ExprKind::Unary(op, operand) => {
            out.push_str(match op {
                UnaryOp::Neg => "-",
                UnaryOp::Not => "not ",
            });
            print_operand(operand, out);
        }
        ExprKind::Binary(op, lhs, rhs) => {
            print_operand(lhs, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            print_operand(rhs, out);
        }
        ExprKind::IfElse(c, t, f) => {
            out.push_str("if ");
            print_into(c, out);
            out.push_str(" then ");
            print_into(t, out);
            out.push_str(" else ");
            print_into(f, out);
        }
    }
}

fn print_list(items: &[Expr], out: &mut String) {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        print_into(item, out);
    }
}

fn print_literal(v: &Value, out: &mut String) {
    match v {
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Int(i) if *i < 0 => {
            // No negative literal tokens; i64::MIN has no positive twin.
            out.push_str(&format!("(0 - {})", i.unsigned_abs()));
        }
        Value::Int(i) => out.push_str(&i.to_string()),
        Value::Float(x) => out.push_str(&format_float(*x)),
        Value::Str(s) => {
            out.push('"');
            for ch in s.chars() {
                if ch == '"' || ch == '\\' {
                    out.push('\\');
                }
                out.push(ch);
            }
            out.push('"');
        }
        Value::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                print_literal(item, out);
            }
            out.push(']');
        }
        // Tensors and Missing have no literal syntax; print a readable stand-in.
        other => out.push_str(&format!("<{}>", other.type_name())),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_print(self))
    }
}
