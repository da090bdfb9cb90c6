//! Proptest strategies for expression trees the parser can produce.

use proptest::prelude::*;

use super::ast::{BinaryOp, Expr, ExprKind, UnaryOp};
use super::lexer::KEYWORDS;
use crate::value::Value;

pub fn arb_ident() -> impl Strategy<Value = String> {
    "[A-Za-z_][A-Za-z0-9_]{0,6}".prop_filter("keyword", |s| !KEYWORDS.contains(&s.as_str()))
}

fn arb_literal() -> impl Strategy<Value = Value> {
    prop_oneof![
        (0i64..=i64::MAX).prop_map(Value::Int),
        (0i64..1000).prop_map(Value::Int),
        (0.0f64..1e12).prop_map(Value::Float),
        prop_oneof![Just(1e300), Just(2.5e-8), Just(0.1), Just(3.0)].prop_map(Value::Float),
        any::<bool>().prop_map(Value::Bool),
        "[ -~é]{0,6}".prop_map(Value::Str),
    ]
}

fn arb_binop() -> impl Strategy<Value = BinaryOp> {
    use BinaryOp::*;
    prop::sample::select(vec![Add, Sub, Mul, Div, Rem, Eq, Ne, Lt, Le, Gt, Ge, And, Or])
}

pub fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        arb_literal().prop_map(Expr::lit),
        arb_ident().prop_map(|n| Expr::reference(&n)),
    ];
    leaf.prop_recursive(5, 48, 4, |inner| {
        prop_oneof![
            (arb_ident(), prop::collection::vec(inner.clone(), 0..4))
                .prop_map(|(n, args)| Expr::call(&n, args)),
            prop::collection::vec(inner.clone(), 0..4)
                .prop_map(|xs| Expr::synthetic(ExprKind::ListLit(xs))),
            (prop_oneof![Just(UnaryOp::Neg), Just(UnaryOp::Not)], inner.clone())
                .prop_map(|(op, e)| Expr::synthetic(ExprKind::Unary(op, Box::new(e)))),
            (arb_binop(), inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            (inner.clone(), inner.clone(), inner).prop_map(|(c, t, e)| {
                Expr::synthetic(ExprKind::IfElse(Box::new(c), Box::new(t), Box::new(e)))
            }),
        ]
    })
}
