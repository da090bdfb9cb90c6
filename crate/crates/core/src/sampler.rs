//! Forward sampling of a compiled model.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{eval, pretty_print, Bindings, EvalEnv, EvalError, Expr};
use crate::graph::CompiledModel;
use crate::rng::{RandomStream, StreamKey};
use crate::spec::{compile, NodeKind, ValidationError, ValidationIssue};
use crate::stdlib::FunctionRegistry;
use crate::value::{format_float, Value};

pub const DEFAULT_MAX_REJECTION_FACTOR: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub num_samples: u64,
    pub seed: u64,
    /// Node name → replacement expression.
    pub interventions: BTreeMap<String, Expr>,
    pub max_rejection_factor: u64,
    /// Worker threads; 0 or 1 samples on the calling thread.
    pub threads: usize,
}

impl RunConfig {
    pub fn new(num_samples: u64, seed: u64) -> Self {
        RunConfig {
            num_samples,
            seed,
            interventions: BTreeMap::new(),
            max_rejection_factor: DEFAULT_MAX_REJECTION_FACTOR,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    /// Every node except the selection node.
    pub values: BTreeMap<String, Value>,
    pub stratum: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub rows: Vec<SampleRow>,
    /// Observed nodes in topological order.
    pub column_order: Vec<String>,
    /// Sample indices consumed, kept or rejected.
    pub attempts: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node {node}: {message}")]
pub struct CoercionError {
    pub node: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("{0}")]
    Validation(#[from] ValidationError),
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Coercion(#[from] CoercionError),
    #[error("selection starved: kept {kept} rows after {attempts} attempts")]
    SelectionStarvation { kept: u64, attempts: u64 },
    #[error("cannot start worker threads: {0}")]
    Threads(String),
}

/// Replace the expressions of the given standard nodes and revalidate.
pub fn apply_interventions(
    model: &CompiledModel,
    interventions: &BTreeMap<String, Expr>,
    registry: &FunctionRegistry,
) -> Result<CompiledModel, ValidationError> {
    if interventions.is_empty() {
        return Ok(model.clone());
    }
    let mut issues = Vec::new();
    let mut nodes = model.nodes().to_vec();
    for (target, expr) in interventions {
        let Some(node) = nodes.iter_mut().find(|n| &n.name == target) else {
            issues.push(ValidationIssue::BadIntervention {
                node: target.clone(),
                reason: "no such node".into(),
            });
            continue;
        };
        if node.kind != NodeKind::Standard {
            issues.push(ValidationIssue::BadIntervention {
                node: target.clone(),
                reason: format!("only standard nodes can be replaced, this is a {} node", node.kind),
            });
            continue;
        }
        node.source = pretty_print(expr);
        node.expr = expr.clone();
    }
    if !issues.is_empty() {
        return Err(ValidationError { issues });
    }
    compile(nodes, registry)
}

/// Missing-node rule: `Missing` where the indicator fires, else the
/// underlying value.
pub fn mask(node: &str, indicator: &Value, underlying: &Value) -> Result<Value, CoercionError> {
    match indicator.as_flag() {
        Some(true) => Ok(Value::Missing),
        Some(false) => Ok(underlying.clone()),
        None => Err(CoercionError {
            node: node.to_string(),
            message: format!("missingness indicator must be a bool or 0/1, got {}", describe(indicator)),
        }),
    }
}

/// Apply [`mask`] to a row whose missing-node entries still hold raw
/// indicator values.
pub fn apply_missing(mut row: SampleRow, model: &CompiledModel) -> Result<SampleRow, CoercionError> {
    for (underlying, missing) in model.missing_map() {
        let indicator = row.values.get(missing).cloned().unwrap_or(Value::Missing);
        let base = row.values.get(underlying).cloned().unwrap_or(Value::Missing);
        row.values.insert(missing.clone(), mask(missing, &indicator, &base)?);
    }
    Ok(row)
}

fn describe(v: &Value) -> String {
    match v {
        Value::Int(i) => format!("int {i}"),
        Value::Float(x) => format!("float {}", format_float(*x)),
        other => other.type_name().to_string(),
    }
}

fn stratum_label(node: &str, v: &Value) -> Result<String, CoercionError> {
    match v {
        Value::Str(s) => Ok(s.clone()),
        Value::Int(i) => Ok(i.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        Value::Float(x) => Ok(format_float(*x)),
        other => Err(CoercionError {
            node: node.to_string(),
            message: format!("stratum label must be a scalar, got {}", other.type_name()),
        }),
    }
}

/// Evaluation order and stream keys, computed once per run.
struct Plan<'m> {
    model: &'m CompiledModel,
    steps: Vec<(usize, StreamKey)>,
}

impl<'m> Plan<'m> {
    fn new(model: &'m CompiledModel, seed: u64) -> Self {
        let steps = model
            .topo_order()
            .iter()
            .map(|name| {
                let i = model.position(name).expect("topological order names declared nodes");
                (i, StreamKey::derive(seed, name))
            })
            .collect();
        Plan { model, steps }
    }

    fn sample(&self, sample_index: u64, registry: &FunctionRegistry) -> Result<(SampleRow, bool), SimError> {
        let mut bindings = Bindings::with_capacity(self.steps.len());
        let mut selected = true;
        let mut stratum = None;
        for &(i, key) in &self.steps {
            let node = &self.model.nodes()[i];
            let mut rng = RandomStream::new(key, sample_index);
            let mut run = |bindings: &Bindings| {
                let mut env = EvalEnv::new(bindings, &mut rng, registry);
                eval(&node.expr, &mut env).map_err(|e| e.in_node(&node.name))
            };
            let value = match node.kind {
                NodeKind::Standard => match node.size {
                    None => run(&bindings)?,
                    Some(k) => Value::List((0..k).map(|_| run(&bindings)).collect::<Result<_, _>>()?),
                },
                NodeKind::Missing => {
                    let indicator = run(&bindings)?;
                    let target = node.underlying.as_deref().unwrap_or_default();
                    let base = bindings.get(target).cloned().unwrap_or(Value::Missing);
                    mask(&node.name, &indicator, &base)?
                }
                NodeKind::Selection => {
                    let v = run(&bindings)?;
                    selected = v.as_flag().ok_or_else(|| CoercionError {
                        node: node.name.clone(),
                        message: format!("selection must be a bool or 0/1, got {}", describe(&v)),
                    })?;
                    v
                }
                NodeKind::Stratify => {
                    let label = stratum_label(&node.name, &run(&bindings)?)?;
                    stratum = Some(label.clone());
                    Value::Str(label)
                }
            };
            bindings.insert(node.name.clone(), value);
        }
        if let Some(sel) = self.model.selection() {
            bindings.remove(sel);
        }
        let values = bindings.into_iter().collect();
        Ok((SampleRow { values, stratum }, selected))
    }
}

/// Evaluate one sample. Each node draws from its own stream keyed by
/// `(seed, node name)` at position `sample_index`.
pub fn sample_one(
    model: &CompiledModel,
    sample_index: u64,
    seed: u64,
    registry: &FunctionRegistry,
) -> Result<(SampleRow, bool), SimError> {
    Plan::new(model, seed).sample(sample_index, registry)
}

/// Draw samples at consecutive indices until `num_samples` pass selection.
pub fn simulate(
    model: &CompiledModel,
    config: &RunConfig,
    registry: &FunctionRegistry,
) -> Result<Dataset, SimError> {
    let model = apply_interventions(model, &config.interventions, registry)?;
    let plan = Plan::new(&model, config.seed);
    let wanted = config.num_samples;
    let limit = wanted.saturating_mul(config.max_rejection_factor.max(1));
    let mut rows = Vec::with_capacity(wanted.min(1 << 20) as usize);
    let mut next = 0u64;

    let pool = if config.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.threads)
                .build()
                .map_err(|e| SimError::Threads(e.to_string()))?,
        )
    } else {
        None
    };

    while (rows.len() as u64) < wanted {
        if next >= limit {
            return Err(SimError::SelectionStarvation {
                kept: rows.len() as u64,
                attempts: next,
            });
        }
        match &pool {
            None => {
                let (row, keep) = plan.sample(next, registry)?;
                next += 1;
                if keep {
                    rows.push(row);
                }
            }
            Some(pool) => {
                // Results are consumed in index order and consumption stops at
                // the same index a sequential run would, so the output matches.
                let need = wanted - rows.len() as u64;
                let batch = need.max(256).min(limit - next);
                let results: Vec<_> = pool.install(|| {
                    (next..next + batch)
                        .into_par_iter()
                        .map(|idx| plan.sample(idx, registry))
                        .collect()
                });
                for result in results {
                    let (row, keep) = result?;
                    next += 1;
                    if keep {
                        rows.push(row);
                        if rows.len() as u64 == wanted {
                            break;
                        }
                    }
                }
            }
        }
    }

    Ok(Dataset {
        rows,
        column_order: model.observed_columns(),
        attempts: next,
    })
}
