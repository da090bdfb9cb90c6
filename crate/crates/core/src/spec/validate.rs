use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use super::{ModelSpec, NodeDecl, NodeKind};
use crate::graph::{detect_cycle, CompiledModel, ParentMap};
use crate::stdlib::{Arity, FunctionRegistry};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    UnresolvedRef { node: String, name: String },
    UnknownFunction { node: String, name: String },
    ArityMismatch { node: String, name: String, expected: Arity, got: usize },
    Cycle { nodes: Vec<String> },
    BadUnderlying { node: String, target: String, reason: String },
    BadIntervention { node: String, reason: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::UnresolvedRef { node, name } => {
                write!(f, "{node}: reference to undeclared node {name:?}")
            }
            ValidationIssue::UnknownFunction { node, name } => {
                write!(f, "{node}: unknown function {name:?}")
            }
            ValidationIssue::ArityMismatch { node, name, expected, got } => {
                write!(f, "{node}: {name} takes {expected} arguments, given {got}")
            }
            ValidationIssue::Cycle { nodes } => {
                let mut path = nodes.clone();
                path.extend(nodes.first().cloned());
                write!(f, "cycle: {}", path.join(" <- "))
            }
            ValidationIssue::BadUnderlying { node, target, reason } => {
                write!(f, "{node}: underlying {target:?} {reason}")
            }
            ValidationIssue::BadIntervention { node, reason } => {
                write!(f, "intervention on {node:?}: {reason}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationError {
    pub issues: Vec<ValidationIssue>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// Check references, calls, missing-node targets and acyclicity, reporting
/// every problem found.
pub fn validate(spec: &ModelSpec, registry: &FunctionRegistry) -> Result<CompiledModel, ValidationError> {
    compile(spec.nodes.clone(), registry)
}

pub(crate) fn compile(
    nodes: Vec<NodeDecl>,
    registry: &FunctionRegistry,
) -> Result<CompiledModel, ValidationError> {
    let kinds: HashMap<&str, NodeKind> = nodes.iter().map(|n| (n.name.as_str(), n.kind)).collect();
    let mut issues = Vec::new();
    let mut resolved = ParentMap::new();
    let mut wrapped: BTreeMap<&str, &str> = BTreeMap::new();

    for node in &nodes {
        let mut parents = Vec::new();
        for name in node.expr.refs_in_order() {
            if kinds.contains_key(name.as_str()) {
                parents.push(name);
            } else {
                issues.push(ValidationIssue::UnresolvedRef {
                    node: node.name.clone(),
                    name,
                });
            }
        }
        for (name, got, _) in node.expr.calls() {
            match registry.get(name) {
                None => issues.push(ValidationIssue::UnknownFunction {
                    node: node.name.clone(),
                    name: name.to_string(),
                }),
                Some(entry) if !entry.arity.accepts(got) => {
                    issues.push(ValidationIssue::ArityMismatch {
                        node: node.name.clone(),
                        name: name.to_string(),
                        expected: entry.arity,
                        got,
                    })
                }
                Some(_) => {}
            }
        }
        if let Some(target) = &node.underlying {
            let bad = |reason: &str| ValidationIssue::BadUnderlying {
                node: node.name.clone(),
                target: target.clone(),
                reason: reason.to_string(),
            };
            match kinds.get(target.as_str()) {
                None => issues.push(bad("is not a declared node")),
                Some(NodeKind::Standard) => {
                    if let Some(other) = wrapped.insert(target, &node.name) {
                        issues.push(bad(&format!("is already masked by {other}")));
                    } else if !parents.contains(target) {
                        parents.push(target.clone());
                    }
                }
                Some(kind) => issues.push(bad(&format!("is a {kind} node, not a standard one"))),
            }
        }
        resolved.insert(node.name.clone(), parents);
    }

    if let Some(cycle) = detect_cycle(&resolved) {
        issues.push(ValidationIssue::Cycle { nodes: cycle });
    }
    if !issues.is_empty() {
        return Err(ValidationError { issues });
    }
    CompiledModel::assemble(nodes).map_err(|e| ValidationError {
        issues: vec![ValidationIssue::Cycle { nodes: e.cycle }],
    })
}
