//! Host functions used by the two bundled example models, built from stdlib
//! primitives.
//!
//! | name | arguments | result |
//! |------|-----------|--------|
//! | `complement_binomial` | `p` | `binomial(1, 1 - p)` |
//! | `sigmoid_binomial` | `c, x, preset` | `binomial(1, sigmoid(a + b*c + d*x))`, coefficients by preset |
//! | `drawImage` | `h, v, r, c` | 16×16 tensor |
//! | `assign_protocol` | `disease` | `binomial(1, 0.7)` if disease else `binomial(1, 0.3)` |
//! | `create_airr` | `disease, age, protocol` | list of 20 sequences of length 12 |
//! | `encode_kmers` | `sequences` | 3-mer counts over `ACGT`, 64 integers |

use crate::rng::RandomStream;
use crate::stdlib::{args, dist, fill_rect, implant, kmer_counts, Arity, FnError, FunctionImpl, FunctionRegistry, RegistryError};
use crate::value::{Tensor, Value};

pub const IMAGE_SIDE: usize = 16;
pub const REPERTOIRE_SIZE: usize = 20;
pub const SEQUENCE_LENGTH: i64 = 12;
pub const DISEASE_MOTIF: &str = "CAGT";
pub const PROTOCOL_MOTIF: &str = "GG";
pub const KMER_K: i64 = 3;
pub const ALPHABET: &str = "ACGT";

/// Add every bundled helper to `registry`.
pub fn register(registry: &mut FunctionRegistry) -> Result<(), RegistryError> {
    registry.register_host_function(
        "complement_binomial",
        Arity::Exact(1),
        FunctionImpl::stochastic(|a, rng| {
            let p = args::float(a, 0)?;
            dist::binomial(rng, 1, 1.0 - p).map(Value::Int)
        }),
    )?;
    registry.register_host_function(
        "sigmoid_binomial",
        Arity::Exact(3),
        FunctionImpl::stochastic(|a, rng| {
            let p = sigmoid_probability(args::float(a, 0)?, args::float(a, 1)?, args::string(a, 2)?)?;
            dist::binomial(rng, 1, p).map(Value::Int)
        }),
    )?;
    registry.register_host_function(
        "drawImage",
        Arity::Exact(4),
        FunctionImpl::pure(|a| {
            draw_image(args::flag(a, 0)?, args::flag(a, 1)?, args::flag(a, 2)?, args::flag(a, 3)?)
                .map(Value::Tensor)
        }),
    )?;
    registry.register_host_function(
        "assign_protocol",
        Arity::Exact(1),
        FunctionImpl::stochastic(|a, rng| {
            let p = if args::flag(a, 0)? { 0.7 } else { 0.3 };
            dist::binomial(rng, 1, p).map(Value::Int)
        }),
    )?;
    registry.register_host_function(
        "create_airr",
        Arity::Exact(3),
        FunctionImpl::stochastic(|a, rng| {
            let seqs = create_airr(rng, args::flag(a, 0)?, args::int(a, 1)?, args::flag(a, 2)?)?;
            Ok(Value::List(seqs.into_iter().map(Value::Str).collect()))
        }),
    )?;
    registry.register_host_function(
        "encode_kmers",
        Arity::Exact(1),
        FunctionImpl::pure(|a| {
            let seqs = args::list(a, 0)?
                .iter()
                .map(|v| v.as_str().ok_or_else(|| FnError::new("expects a list of strings")))
                .collect::<Result<Vec<_>, _>>()?;
            let counts = kmer_counts(&seqs, KMER_K, ALPHABET)?;
            Ok(Value::List(counts.into_iter().map(|c| Value::Int(c as i64)).collect()))
        }),
    )?;
    Ok(())
}

/// `sigmoid(a + b*c + d*x)` with `(a, b, d)` chosen by preset `"H"` or `"V"`.
pub fn sigmoid_probability(c: f64, x: f64, preset: &str) -> Result<f64, FnError> {
    let (a, b, d) = match preset {
        "H" => (-2.0, 2.0, 2.0),
        "V" => (-2.0, 1.0, 3.0),
        other => return Err(FnError::new(format!("unknown preset {other:?}; expected \"H\" or \"V\""))),
    };
    Ok(1.0 / (1.0 + (-(a + b * c + d * x)).exp()))
}

/// Black canvas with a horizontal bar (`h`), a vertical bar (`v`) and a
/// corner square (`r`); shapes are drawn at full intensity when `c` is set
/// and at half intensity otherwise.
pub fn draw_image(h: bool, v: bool, r: bool, c: bool) -> Result<Tensor, FnError> {
    let side = IMAGE_SIDE as i64;
    let ink = if c { 1.0 } else { 0.5 };
    let mut img = Tensor::zeros(vec![IMAGE_SIDE, IMAGE_SIDE]).map_err(|e| FnError::new(e.to_string()))?;
    if h {
        img = fill_rect(&img, [7, 0, 9, side], ink)?;
    }
    if v {
        img = fill_rect(&img, [0, 7, side, 9], ink)?;
    }
    if r {
        img = fill_rect(&img, [1, 1, 5, 5], ink)?;
    }
    Ok(img)
}

/// Repertoire of [`REPERTOIRE_SIZE`] sequences. Each sequence after the
/// first duplicates its predecessor with probability `age / 100`; fresh
/// sequences carry [`DISEASE_MOTIF`] when `disease` and [`PROTOCOL_MOTIF`]
/// when `protocol`, at uniformly drawn positions.
pub fn create_airr(rng: &mut RandomStream, disease: bool, age: i64, protocol: bool) -> Result<Vec<String>, FnError> {
    let dup = (age as f64 / 100.0).clamp(0.0, 1.0);
    let mut seqs: Vec<String> = Vec::with_capacity(REPERTOIRE_SIZE);
    for i in 0..REPERTOIRE_SIZE {
        if i > 0 && dist::bernoulli(rng, dup)? == 1 {
            let prev = seqs[i - 1].clone();
            seqs.push(prev);
            continue;
        }
        let mut seq = dist::random_seq(rng, ALPHABET, SEQUENCE_LENGTH)?;
        if disease {
            let pos = dist::randint(rng, 0, SEQUENCE_LENGTH - DISEASE_MOTIF.len() as i64 + 1)?;
            seq = implant(&seq, DISEASE_MOTIF, pos)?;
        }
        if protocol {
            let pos = dist::randint(rng, 0, SEQUENCE_LENGTH - PROTOCOL_MOTIF.len() as i64 + 1)?;
            seq = implant(&seq, PROTOCOL_MOTIF, pos)?;
        }
        seqs.push(seq);
    }
    Ok(seqs)
}
