use std::fmt::Write;

use super::NodeKind;
use crate::graph::CompiledModel;

const DOT_KEYWORDS: &[&str] = &["node", "edge", "graph", "digraph", "subgraph", "strict"];

fn id(name: &str) -> String {
    if DOT_KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(name)) {
        format!("\"{name}\"")
    } else {
        name.to_string()
    }
}

/// Graphviz rendering: one statement per node in declaration order, then one
/// edge per parent link.
pub fn to_dot(model: &CompiledModel) -> String {
    let mut out = String::from("digraph model {\n");
    for node in model.nodes() {
        let mut attrs: Vec<String> = Vec::new();
        match node.kind {
            NodeKind::Standard => {}
            NodeKind::Selection => {
                attrs.push("shape=diamond".into());
                attrs.push(format!("label=\"{}\\n[selection]\"", node.name));
            }
            NodeKind::Missing => {
                attrs.push("shape=box".into());
                let target = node.underlying.as_deref().unwrap_or("");
                attrs.push(format!("label=\"{}\\n[missing: {target}]\"", node.name));
            }
            NodeKind::Stratify => {
                attrs.push("shape=hexagon".into());
                attrs.push(format!("label=\"{}\\n[stratify]\"", node.name));
            }
        }
        if let Some(k) = node.size {
            attrs.push(format!("xlabel=\"x{k}\""));
        }
        if !node.observed {
            attrs.push("style=dashed".into());
        }
        if attrs.is_empty() {
            let _ = writeln!(out, "  {};", id(&node.name));
        } else {
            let _ = writeln!(out, "  {} [{}];", id(&node.name), attrs.join(", "));
        }
    }
    for (parent, child) in model.edges() {
        let _ = writeln!(out, "  {} -> {};", id(parent), id(child));
    }
    out.push_str("}\n");
    out
}
