//! Forward sampling of synthetic datasets from DAG models written in YAML.

pub mod bundled;
pub mod expr;
pub mod graph;
pub mod output;
pub mod rng;
pub mod sampler;
pub mod spec;
pub mod stdlib;
pub mod value;
