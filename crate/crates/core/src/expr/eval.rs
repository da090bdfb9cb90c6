use std::cmp::Ordering;
use std::collections::HashMap;

use thiserror::Error;

use super::ast::{BinaryOp, Expr, ExprKind, UnaryOp};
use super::lexer::Span;
use crate::rng::RandomStream;
use crate::stdlib::FunctionRegistry;
use crate::value::{values_equal, Value};

/// Node values visible to an expression.
pub type Bindings = HashMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{message} (at {span})", node.as_ref().map(|n| format!("node {n}: ")).unwrap_or_default())]
pub struct EvalError {
    pub span: Span,
    pub message: String,
    /// Node whose expression failed, filled in by the sampler.
    pub node: Option<String>,
}

impl EvalError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        EvalError {
            span,
            message: message.into(),
            node: None,
        }
    }

    pub fn in_node(mut self, node: &str) -> Self {
        self.node.get_or_insert_with(|| node.to_string());
        self
    }
}

pub struct EvalEnv<'a> {
    pub bindings: &'a Bindings,
    pub rng: &'a mut RandomStream,
    pub registry: &'a FunctionRegistry,
}

impl<'a> EvalEnv<'a> {
    pub fn new(
        bindings: &'a Bindings,
        rng: &'a mut RandomStream,
        registry: &'a FunctionRegistry,
    ) -> Self {
        EvalEnv {
            bindings,
            rng,
            registry,
        }
    }
}

pub fn eval(e: &Expr, env: &mut EvalEnv<'_>) -> Result<Value, EvalError> {
    match &e.kind {
        ExprKind::Lit(v) => Ok(v.clone()),
        ExprKind::Ref(name) => env
            .bindings
            .get(name)
            .cloned()
            .ok_or_else(|| EvalError::new(e.span, format!("unbound name {name}"))),
        ExprKind::ListLit(items) => items
            .iter()
            .map(|item| eval(item, env))
            .collect::<Result<Vec<_>, _>>()
            .map(Value::List),
        ExprKind::Call(name, args) => {
            let values = args
                .iter()
                .map(|a| eval(a, env))
                .collect::<Result<Vec<_>, _>>()?;
            env.registry
                .call(name, &values, env.rng)
                .map_err(|err| EvalError::new(e.span, format!("{name}: {err}")))
        }
        ExprKind::Unary(op, operand) => {
            let v = eval(operand, env)?;
            match op {
                UnaryOp::Not => flag(&v, operand.span, "not").map(|b| Value::Bool(!b)),
                UnaryOp::Neg => match v {
                    Value::Int(i) => i
                        .checked_neg()
                        .map(Value::Int)
                        .ok_or_else(|| EvalError::new(e.span, "integer overflow")),
                    Value::Float(x) => Ok(Value::Float(-x)),
                    other => Err(type_error(e.span, "-", &[&other])),
                },
            }
        }
        ExprKind::IfElse(cond, then, otherwise) => {
            let c = eval(cond, env)?;
            if flag(&c, cond.span, "if")? {
                eval(then, env)
            } else {
                eval(otherwise, env)
            }
        }
        ExprKind::Binary(BinaryOp::And, lhs, rhs) => {
            let l = eval(lhs, env)?;
            if !flag(&l, lhs.span, "and")? {
                return Ok(Value::Bool(false));
            }
            let r = eval(rhs, env)?;
            flag(&r, rhs.span, "and").map(Value::Bool)
        }
        ExprKind::Binary(BinaryOp::Or, lhs, rhs) => {
            let l = eval(lhs, env)?;
            if flag(&l, lhs.span, "or")? {
                return Ok(Value::Bool(true));
            }
            let r = eval(rhs, env)?;
            flag(&r, rhs.span, "or").map(Value::Bool)
        }
        ExprKind::Binary(op, lhs, rhs) => {
            let l = eval(lhs, env)?;
            let r = eval(rhs, env)?;
            binary(*op, &l, &r, e.span)
        }
    }
}

fn flag(v: &Value, span: Span, context: &str) -> Result<bool, EvalError> {
    v.as_flag().ok_or_else(|| {
        EvalError::new(
            span,
            format!("{context} needs a bool or 0/1, got {}", v.type_name()),
        )
    })
}

fn type_error(span: Span, op: &str, operands: &[&Value]) -> EvalError {
    let kinds: Vec<&str> = operands.iter().map(|v| v.type_name()).collect();
    if operands.iter().any(|v| v.is_missing()) {
        return EvalError::new(span, format!("operand of {op} is missing"));
    }
    EvalError::new(span, format!("{op} is not defined for {}", kinds.join(" and ")))
}

pub(crate) fn binary(op: BinaryOp, l: &Value, r: &Value, span: Span) -> Result<Value, EvalError> {
    use Value::{Float, Int};
    match op {
        BinaryOp::Eq => return Ok(Value::Bool(values_equal(l, r))),
        BinaryOp::Ne => return Ok(Value::Bool(!values_equal(l, r))),
        BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
            let ord = compare(l, r).ok_or_else(|| type_error(span, op.symbol(), &[l, r]))?;
            let result = match op {
                BinaryOp::Lt => ord == Ordering::Less,
                BinaryOp::Le => ord != Ordering::Greater,
                BinaryOp::Gt => ord == Ordering::Greater,
                _ => ord != Ordering::Less,
            };
            return Ok(Value::Bool(result));
        }
        _ => {}
    }

    let overflow = || EvalError::new(span, "integer overflow");
    match (l, r) {
        (Int(a), Int(b)) => match op {
            BinaryOp::Add => a.checked_add(*b).map(Int).ok_or_else(overflow),
            BinaryOp::Sub => a.checked_sub(*b).map(Int).ok_or_else(overflow),
            BinaryOp::Mul => a.checked_mul(*b).map(Int).ok_or_else(overflow),
            BinaryOp::Div => {
                if *b == 0 {
                    Err(EvalError::new(span, "division by zero"))
                } else {
                    Ok(Float(*a as f64 / *b as f64))
                }
            }
            BinaryOp::Rem => {
                if *b == 0 {
                    return Err(EvalError::new(span, "division by zero"));
                }
                let rem = a.checked_rem(*b).ok_or_else(overflow)?;
                Ok(Int(if rem != 0 && (rem < 0) != (*b < 0) { rem + b } else { rem }))
            }
            _ => unreachable!("logical and comparison operators handled above"),
        },
        _ => {
            let (Some(a), Some(b)) = (l.as_f64(), r.as_f64()) else {
                return Err(type_error(span, op.symbol(), &[l, r]));
            };
            match op {
                BinaryOp::Add => Ok(Float(a + b)),
                BinaryOp::Sub => Ok(Float(a - b)),
                BinaryOp::Mul => Ok(Float(a * b)),
                BinaryOp::Div | BinaryOp::Rem if b == 0.0 => {
                    Err(EvalError::new(span, "division by zero"))
                }
                BinaryOp::Div => Ok(Float(a / b)),
                BinaryOp::Rem => {
                    let rem = a % b;
                    Ok(Float(if rem != 0.0 && (rem < 0.0) != (b < 0.0) { rem + b } else { rem }))
                }
                _ => unreachable!("logical and comparison operators handled above"),
            }
        }
    }
}

fn compare(l: &Value, r: &Value) -> Option<Ordering> {
    match (l, r) {
        (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
        (Value::Str(a), Value::Str(b)) => Some(a.cmp(b)),
        _ => l.as_f64()?.partial_cmp(&r.as_f64()?),
    }
}
