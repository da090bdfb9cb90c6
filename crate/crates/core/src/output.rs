//! CSV files and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::expr::pretty_print;
use crate::graph::CompiledModel;
use crate::sampler::{Dataset, RunConfig, SampleRow};
use crate::value::{csv_cell, Value};

pub const ENGINE_VERSION: &str = concat!("dagforge ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("stratum label {0:?} may only contain letters, digits, '_' and '-'")]
    StratumName(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// CSV text for `rows`: header, then one line per row, LF-terminated.
pub fn csv_bytes<'a>(columns: &[String], rows: impl IntoIterator<Item = &'a SampleRow>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    // Writing into a Vec cannot fail.
    w.write_record(columns).expect("in-memory write");
    for row in rows {
        let cells = columns
            .iter()
            .map(|c| csv_cell(row.values.get(c).unwrap_or(&Value::Missing)));
        w.write_record(cells).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Write `<csv_name>.csv`, or one `<csv_name>_<label>.csv` per stratum label
/// (in label order) when the rows carry strata. Returns the paths written.
pub fn write_csv(ds: &Dataset, dir: &Path, csv_name: &str) -> Result<Vec<PathBuf>, OutputError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let stratified = ds.rows.iter().any(|r| r.stratum.is_some());
    if !stratified {
        let path = dir.join(format!("{csv_name}.csv"));
        fs::write(&path, csv_bytes(&ds.column_order, &ds.rows)).map_err(io_err(&path))?;
        return Ok(vec![path]);
    }

    let mut groups: BTreeMap<&str, Vec<&SampleRow>> = BTreeMap::new();
    for row in &ds.rows {
        let label = row.stratum.as_deref().unwrap_or_default();
        if !valid_label(label) {
            return Err(OutputError::StratumName(label.to_string()));
        }
        groups.entry(label).or_default().push(row);
    }
    let mut paths = Vec::with_capacity(groups.len());
    for (label, rows) in groups {
        let path = dir.join(format!("{csv_name}_{label}.csv"));
        fs::write(&path, csv_bytes(&ds.column_order, rows)).map_err(io_err(&path))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Declaration-ordered text covering everything that affects sampling.
pub fn canonical_model_text(model: &CompiledModel) -> String {
    let mut out = String::new();
    for n in model.nodes() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            n.name,
            n.kind,
            n.observed,
            n.size.map(|k| k.to_string()).unwrap_or_default(),
            n.underlying.as_deref().unwrap_or_default(),
            pretty_print(&n.expr)
        );
    }
    out
}

pub fn model_hash(model: &CompiledModel) -> String {
    hex::encode(Sha256::digest(canonical_model_text(model)))
}

/// Manifest lines without the timestamp.
pub fn manifest_body(
    model: &CompiledModel,
    ds: &Dataset,
    config: &RunConfig,
    paths: &[PathBuf],
) -> Result<String, OutputError> {
    let mut out = String::new();
    let _ = writeln!(out, "engine={ENGINE_VERSION}");
    let _ = writeln!(out, "model_sha256={}", model_hash(model));
    let _ = writeln!(out, "seed={}", config.seed);
    let _ = writeln!(out, "num_samples={}", config.num_samples);
    let _ = writeln!(out, "kept={}", ds.rows.len());
    let _ = writeln!(out, "attempts={}", ds.attempts);
    let _ = writeln!(out, "max_rejection_factor={}", config.max_rejection_factor);
    for (node, expr) in &config.interventions {
        let _ = writeln!(out, "intervene.{node}={}", pretty_print(expr));
    }
    for path in paths {
        let bytes = fs::read(path).map_err(io_err(path))?;
        let name = path.file_name().unwrap_or_default().to_string_lossy();
        let _ = writeln!(out, "file.{name}.sha256={}", hex::encode(Sha256::digest(bytes)));
    }
    Ok(out)
}

/// Write `<csv_name>.manifest` next to the data files.
pub fn write_manifest(
    model: &CompiledModel,
    ds: &Dataset,
    config: &RunConfig,
    paths: &[PathBuf],
    dir: &Path,
    csv_name: &str,
) -> Result<PathBuf, OutputError> {
    let mut text = manifest_body(model, ds, config, paths)?;
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let _ = writeln!(text, "timestamp_unix={now}");
    let path = dir.join(format!("{csv_name}.manifest"));
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}
