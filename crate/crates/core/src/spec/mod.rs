//! YAML model documents: parsing into [`ModelSpec`] and validation into a
//! [`CompiledModel`](crate::graph::CompiledModel).

mod dot;
mod validate;
mod yaml;

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::expr::{is_identifier, parse, pretty_print, Expr, SyntaxError, KEYWORDS};
use yaml::Yaml;

pub use dot::to_dot;
pub use validate::{validate, ValidationError, ValidationIssue};
pub(crate) use validate::compile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Standard,
    Selection,
    Missing,
    Stratify,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Standard => "standard",
            NodeKind::Selection => "selection",
            NodeKind::Missing => "missing",
            NodeKind::Stratify => "stratify",
        }
    }

    fn parse(text: &str) -> Option<Self> {
        Some(match text {
            "standard" => NodeKind::Standard,
            "selection" => NodeKind::Selection,
            "missing" => NodeKind::Missing,
            "stratify" => NodeKind::Stratify,
            _ => return None,
        })
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeDecl {
    pub name: String,
    pub kind: NodeKind,
    pub expr: Expr,
    /// Expression text as written (or pretty-printed, for replacements).
    pub source: String,
    pub observed: bool,
    /// Plate width.
    pub size: Option<usize>,
    /// For missing nodes, the variable being masked.
    pub underlying: Option<String>,
}

impl NodeDecl {
    /// A standard, observed node.
    pub fn standard(name: &str, expr: Expr) -> Self {
        NodeDecl {
            name: name.to_string(),
            kind: NodeKind::Standard,
            source: pretty_print(&expr),
            expr,
            observed: true,
            size: None,
            underlying: None,
        }
    }

    /// References in first-mention order, then the underlying variable.
    pub fn parent_names(&self) -> Vec<String> {
        let mut names = self.expr.refs_in_order();
        if let Some(u) = &self.underlying {
            if !names.contains(u) {
                names.push(u.clone());
            }
        }
        names
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimInstructions {
    pub csv_name: String,
    pub num_samples: u64,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub nodes: Vec<NodeDecl>,
    pub instructions: SimInstructions,
    /// Non-fatal notes, such as ignored `python_file` keys.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("YAML syntax error: {0}")]
    Yaml(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: cannot parse {text:?}: {inner}")]
    Expression {
        path: String,
        text: String,
        inner: SyntaxError,
    },
}

impl SpecError {
    fn schema(path: &str, message: impl Into<String>) -> Self {
        SpecError::Schema {
            path: path.to_string(),
            message: message.into(),
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            SpecError::Yaml(_) => None,
            SpecError::Schema { path, .. } | SpecError::Expression { path, .. } => Some(path),
        }
    }
}

const IGNORED_KEY: &str = "python_file";

/// Parse a model document.
pub fn parse_model(yaml_text: &str) -> Result<ModelSpec, SpecError> {
    let doc = yaml::from_str(yaml_text).map_err(|e| SpecError::Yaml(e.to_string()))?;
    let mut warnings = Vec::new();
    let top = entries(&doc, "$")?;

    let mut graph = None;
    let mut instructions = None;
    for (key, value) in &top {
        match key.as_str() {
            "graph" => graph = Some(value),
            "instructions" => instructions = Some(value),
            other => return Err(SpecError::schema(other, "unknown top-level key")),
        }
    }
    let graph = graph.ok_or_else(|| SpecError::schema("$", "missing graph block"))?;
    let instructions =
        instructions.ok_or_else(|| SpecError::schema("$", "missing instructions block"))?;

    let mut nodes_block = None;
    for (key, value) in entries(graph, "graph")? {
        match key.as_str() {
            "nodes" => nodes_block = Some(value),
            IGNORED_KEY => warnings.push(ignored_warning("graph.python_file")),
            _ => return Err(SpecError::schema(&format!("graph.{key}"), "unknown key")),
        }
    }
    let nodes_block = nodes_block.ok_or_else(|| SpecError::schema("graph", "missing nodes block"))?;

    let mut nodes = Vec::new();
    for (name, value) in entries(nodes_block, "graph.nodes")? {
        let path = format!("graph.nodes.{name}");
        if name == IGNORED_KEY {
            warnings.push(ignored_warning(&path));
            continue;
        }
        nodes.push(parse_node(&name, value, &path)?);
    }
    if nodes.is_empty() {
        return Err(SpecError::schema("graph.nodes", "model declares no nodes"));
    }
    for kind in [NodeKind::Selection, NodeKind::Stratify] {
        let of_kind: Vec<&str> = nodes
            .iter()
            .filter(|n| n.kind == kind)
            .map(|n| n.name.as_str())
            .collect();
        if of_kind.len() > 1 {
            return Err(SpecError::schema(
                "graph.nodes",
                format!("at most one {kind} node is allowed, found {}", of_kind.join(", ")),
            ));
        }
    }

    Ok(ModelSpec {
        nodes,
        instructions: parse_instructions(instructions)?,
        warnings,
    })
}

fn ignored_warning(path: &str) -> String {
    format!("{path}: script files are not loaded; key ignored")
}

/// Mapping entries with string keys, rejecting duplicates.
fn entries<'a>(value: &'a Yaml, path: &str) -> Result<Vec<(String, &'a Yaml)>, SpecError> {
    let Yaml::Map(map) = value else {
        return Err(SpecError::schema(
            path,
            format!("expected a mapping, found {}", value.describe()),
        ));
    };
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(map.len());
    for (k, v) in map {
        let key = match k {
            Yaml::Str(s) => s.clone(),
            other => match other.scalar_text() {
                Some(text) => text,
                None => {
                    return Err(SpecError::schema(
                        path,
                        format!("keys must be scalars, found {}", other.describe()),
                    ))
                }
            },
        };
        if !seen.insert(key.clone()) {
            return Err(SpecError::schema(&format!("{path}.{key}"), "duplicate key"));
        }
        out.push((key, v));
    }
    Ok(out)
}

fn parse_node(name: &str, value: &Yaml, path: &str) -> Result<NodeDecl, SpecError> {
    if !is_identifier(name) {
        return Err(SpecError::schema(path, "node name is not an identifier"));
    }
    if KEYWORDS.contains(&name) {
        return Err(SpecError::schema(path, "node name is a reserved word"));
    }

    let mut function = None;
    let mut observed = None;
    let mut size = None;
    let mut kind = NodeKind::Standard;
    let mut underlying = None;
    let mut function_path = path.to_string();

    match value {
        Yaml::Map(_) => {
            for (key, v) in entries(value, path)? {
                let key_path = format!("{path}.{key}");
                match key.as_str() {
                    "function" => {
                        function = Some(expr_text(v, &key_path)?);
                        function_path = key_path;
                    }
                    "observed" => observed = Some(parse_bool(v, &key_path)?),
                    "size" => size = Some(positive(v, &key_path)?),
                    "kind" => {
                        let text = v.scalar_text().unwrap_or_default();
                        kind = NodeKind::parse(&text).ok_or_else(|| {
                            SpecError::schema(
                                &key_path,
                                format!(
                                    "bad kind {text:?}; expected standard, selection, missing or stratify"
                                ),
                            )
                        })?;
                    }
                    "underlying" => {
                        let Yaml::Str(target) = v else {
                            return Err(SpecError::schema(&key_path, "expected a node name"));
                        };
                        underlying = Some(target.clone());
                    }
                    _ => return Err(SpecError::schema(&key_path, "unknown key")),
                }
            }
        }
        other => function = Some(expr_text(other, path)?),
    }

    let source = function.ok_or_else(|| SpecError::schema(path, "missing function"))?;
    let expr = parse(&source).map_err(|inner| SpecError::Expression {
        path: function_path,
        text: source.clone(),
        inner,
    })?;

    match kind {
        NodeKind::Missing if underlying.is_none() => {
            return Err(SpecError::schema(path, "missing node needs an underlying key"));
        }
        NodeKind::Missing => {}
        _ if underlying.is_some() => {
            return Err(SpecError::schema(
                &format!("{path}.underlying"),
                "only missing nodes take an underlying key",
            ));
        }
        _ => {}
    }
    if size.is_some() && kind != NodeKind::Standard {
        return Err(SpecError::schema(
            &format!("{path}.size"),
            "size is only allowed on standard nodes",
        ));
    }
    let observed = match (kind, observed) {
        (NodeKind::Selection | NodeKind::Stratify, Some(_)) => {
            return Err(SpecError::schema(
                &format!("{path}.observed"),
                format!("visibility of a {kind} node is fixed"),
            ));
        }
        (NodeKind::Selection, None) => false,
        (_, flag) => flag.unwrap_or(true),
    };

    Ok(NodeDecl {
        name: name.to_string(),
        kind,
        expr,
        source,
        observed,
        size,
        underlying,
    })
}

fn expr_text(value: &Yaml, path: &str) -> Result<String, SpecError> {
    value.scalar_text().ok_or_else(|| {
        SpecError::schema(
            path,
            format!("expected an expression, found {}", value.describe()),
        )
    })
}

fn parse_bool(value: &Yaml, path: &str) -> Result<bool, SpecError> {
    match value {
        Yaml::Bool(b) => Ok(*b),
        Yaml::Str(s) if s.eq_ignore_ascii_case("true") => Ok(true),
        Yaml::Str(s) if s.eq_ignore_ascii_case("false") => Ok(false),
        other => Err(SpecError::schema(
            path,
            format!("expected true or false, found {}", other.describe()),
        )),
    }
}

fn unsigned(value: &Yaml, path: &str) -> Result<u64, SpecError> {
    match value {
        Yaml::Int(i) => u64::try_from(*i)
            .map_err(|_| SpecError::schema(path, format!("{i} is outside 0..=2^64-1"))),
        other => Err(SpecError::schema(
            path,
            format!("expected an integer, found {}", other.describe()),
        )),
    }
}

fn positive(value: &Yaml, path: &str) -> Result<usize, SpecError> {
    let n = unsigned(value, path)?;
    if n == 0 {
        return Err(SpecError::schema(path, "must be at least 1"));
    }
    usize::try_from(n).map_err(|_| SpecError::schema(path, "too large"))
}

fn parse_instructions(value: &Yaml) -> Result<SimInstructions, SpecError> {
    let mut simulation = None;
    for (key, v) in entries(value, "instructions")? {
        match key.as_str() {
            "simulation" => simulation = Some(v),
            _ => return Err(SpecError::schema(&format!("instructions.{key}"), "unknown key")),
        }
    }
    let simulation =
        simulation.ok_or_else(|| SpecError::schema("instructions", "missing simulation block"))?;

    let mut csv_name = None;
    let mut num_samples = None;
    let mut seed = None;
    let mut output_dir = None;
    for (key, v) in entries(simulation, "instructions.simulation")? {
        let path = format!("instructions.simulation.{key}");
        match key.as_str() {
            "csv_name" => {
                let name = v
                    .scalar_text()
                    .ok_or_else(|| SpecError::schema(&path, "expected a file name"))?;
                if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
                    return Err(SpecError::schema(&path, format!("invalid file name {name:?}")));
                }
                csv_name = Some(name);
            }
            "num_samples" => num_samples = Some(positive(v, &path)? as u64),
            "seed" => seed = Some(unsigned(v, &path)?),
            "output_dir" => {
                let dir = v
                    .scalar_text()
                    .ok_or_else(|| SpecError::schema(&path, "expected a path"))?;
                output_dir = Some(PathBuf::from(dir));
            }
            _ => return Err(SpecError::schema(&path, "unknown key")),
        }
    }
    Ok(SimInstructions {
        csv_name: csv_name
            .ok_or_else(|| SpecError::schema("instructions.simulation", "missing csv_name"))?,
        num_samples: num_samples
            .ok_or_else(|| SpecError::schema("instructions.simulation", "missing num_samples"))?,
        seed,
        output_dir,
    })
}
