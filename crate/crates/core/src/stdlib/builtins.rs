use super::dist;
use super::{Arity, FnError, FunctionImpl, FunctionRegistry};
use crate::value::{csv_cell, Tensor, Value};

// Guards against accidental huge allocations from a single call.
const MAX_TENSOR_ENTRIES: usize = 1 << 26;
const MAX_KMER_SPACE: usize = 1 << 24;

/// Argument accessors for function bodies, usable by host functions too.
pub mod args {
    use super::*;

    fn arg(args: &[Value], i: usize) -> Result<&Value, FnError> {
        args.get(i)
            .ok_or_else(|| FnError::new(format!("missing argument {}", i + 1)))
    }

    fn kind_error(i: usize, want: &str, got: &Value) -> FnError {
        FnError::new(format!(
            "argument {} must be {want}, got {}",
            i + 1,
            got.type_name()
        ))
    }

    pub fn float(args: &[Value], i: usize) -> Result<f64, FnError> {
        let v = arg(args, i)?;
        v.as_f64().ok_or_else(|| kind_error(i, "a number", v))
    }

    pub fn int(args: &[Value], i: usize) -> Result<i64, FnError> {
        let v = arg(args, i)?;
        v.as_i64().ok_or_else(|| kind_error(i, "an integer", v))
    }

    pub fn flag(args: &[Value], i: usize) -> Result<bool, FnError> {
        let v = arg(args, i)?;
        v.as_flag().ok_or_else(|| kind_error(i, "a bool or 0/1", v))
    }

    pub fn string(args: &[Value], i: usize) -> Result<&str, FnError> {
        let v = arg(args, i)?;
        v.as_str().ok_or_else(|| kind_error(i, "a string", v))
    }

    pub fn list(args: &[Value], i: usize) -> Result<&[Value], FnError> {
        let v = arg(args, i)?;
        v.as_list().ok_or_else(|| kind_error(i, "a list", v))
    }

    pub fn tensor(args: &[Value], i: usize) -> Result<&Tensor, FnError> {
        match arg(args, i)? {
            Value::Tensor(t) => Ok(t),
            other => Err(kind_error(i, "a tensor", other)),
        }
    }

    pub fn floats(args: &[Value], i: usize) -> Result<Vec<f64>, FnError> {
        list(args, i)?
            .iter()
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| FnError::new(format!("argument {} must hold numbers", i + 1)))
            })
            .collect()
    }

    pub fn any(args: &[Value], i: usize) -> Result<&Value, FnError> {
        arg(args, i)
    }
}

fn stochastic(
    registry: &mut FunctionRegistry,
    name: &str,
    arity: usize,
    f: impl Fn(&[Value], &mut crate::rng::RandomStream) -> Result<Value, FnError> + Send + Sync + 'static,
) {
    registry.insert_builtin(name, Arity::Exact(arity), FunctionImpl::stochastic(f));
}

fn pure(
    registry: &mut FunctionRegistry,
    name: &str,
    arity: Arity,
    f: impl Fn(&[Value]) -> Result<Value, FnError> + Send + Sync + 'static,
) {
    registry.insert_builtin(name, arity, FunctionImpl::pure(f));
}

fn unary_float(registry: &mut FunctionRegistry, name: &str, f: fn(f64) -> Result<f64, FnError>) {
    pure(registry, name, Arity::Exact(1), move |a| {
        f(args::float(a, 0)?).map(Value::Float)
    });
}

pub(super) fn install(r: &mut FunctionRegistry) {
    stochastic(r, "uniform", 2, |a, rng| {
        dist::uniform(rng, args::float(a, 0)?, args::float(a, 1)?).map(Value::Float)
    });
    stochastic(r, "normal", 2, |a, rng| {
        dist::normal(rng, args::float(a, 0)?, args::float(a, 1)?).map(Value::Float)
    });
    stochastic(r, "bernoulli", 1, |a, rng| {
        dist::bernoulli(rng, args::float(a, 0)?).map(Value::Int)
    });
    stochastic(r, "binomial", 2, |a, rng| {
        dist::binomial(rng, args::int(a, 0)?, args::float(a, 1)?).map(Value::Int)
    });
    stochastic(r, "poisson", 1, |a, rng| {
        dist::poisson(rng, args::float(a, 0)?).map(Value::Int)
    });
    stochastic(r, "randint", 2, |a, rng| {
        dist::randint(rng, args::int(a, 0)?, args::int(a, 1)?).map(Value::Int)
    });
    stochastic(r, "categorical", 1, |a, rng| {
        dist::categorical(rng, &args::floats(a, 0)?).map(|i| Value::Int(i as i64))
    });
    stochastic(r, "choice", 2, |a, rng| {
        let items = args::list(a, 0)?;
        let probs = args::floats(a, 1)?;
        if items.len() != probs.len() {
            return Err(FnError::new(format!(
                "{} items but {} probabilities",
                items.len(),
                probs.len()
            )));
        }
        dist::categorical(rng, &probs).map(|i| items[i].clone())
    });
    stochastic(r, "random_seq", 2, |a, rng| {
        dist::random_seq(rng, args::string(a, 0)?, args::int(a, 1)?).map(Value::Str)
    });

    unary_float(r, "sigmoid", |x| Ok(1.0 / (1.0 + (-x).exp())));
    unary_float(r, "exp", |x| Ok(x.exp()));
    unary_float(r, "log", |x| {
        if x > 0.0 {
            Ok(x.ln())
        } else {
            Err(FnError::new(format!("log of non-positive {x}")))
        }
    });
    unary_float(r, "sqrt", |x| {
        if x >= 0.0 {
            Ok(x.sqrt())
        } else {
            Err(FnError::new(format!("sqrt of negative {x}")))
        }
    });
    pure(r, "pow", Arity::Exact(2), |a| {
        Ok(Value::Float(args::float(a, 0)?.powf(args::float(a, 1)?)))
    });
    pure(r, "abs", Arity::Exact(1), |a| match args::any(a, 0)? {
        Value::Int(i) => i
            .checked_abs()
            .map(Value::Int)
            .ok_or_else(|| FnError::new("integer overflow")),
        _ => Ok(Value::Float(args::float(a, 0)?.abs())),
    });
    pure(r, "min", Arity::Range { min: 1, max: None }, |a| extreme(a, true));
    pure(r, "max", Arity::Range { min: 1, max: None }, |a| extreme(a, false));
    pure(r, "clamp", Arity::Exact(3), |a| {
        if let (Value::Int(x), Value::Int(lo), Value::Int(hi)) = (&a[0], &a[1], &a[2]) {
            if lo > hi {
                return Err(FnError::new(format!("empty interval [{lo}, {hi}]")));
            }
            return Ok(Value::Int(*x.max(lo).min(hi)));
        }
        let (x, lo, hi) = (args::float(a, 0)?, args::float(a, 1)?, args::float(a, 2)?);
        if lo > hi {
            return Err(FnError::new(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Value::Float(x.clamp(lo, hi)))
    });
    pure(r, "floor", Arity::Exact(1), |a| to_int(args::float(a, 0)?.floor()));
    pure(r, "round", Arity::Exact(1), |a| to_int(args::float(a, 0)?.round()));
    pure(r, "sum", Arity::Exact(1), |a| {
        let items = args::list(a, 0)?;
        if items.iter().all(|v| matches!(v, Value::Int(_))) {
            items
                .iter()
                .try_fold(0i64, |acc, v| acc.checked_add(v.as_i64().unwrap_or(0)))
                .map(Value::Int)
                .ok_or_else(|| FnError::new("integer overflow"))
        } else {
            Ok(Value::Float(args::floats(a, 0)?.iter().sum()))
        }
    });

    pure(r, "get", Arity::Exact(2), |a| {
        let i = args::int(a, 1)?;
        match args::any(a, 0)? {
            Value::List(items) => index(items.len(), i).map(|i| items[i].clone()),
            Value::Str(s) => {
                let chars: Vec<char> = s.chars().collect();
                index(chars.len(), i).map(|i| Value::Str(chars[i].to_string()))
            }
            other => Err(FnError::new(format!("cannot index a {}", other.type_name()))),
        }
    });
    pure(r, "len", Arity::Exact(1), |a| {
        let n = match args::any(a, 0)? {
            Value::List(items) => items.len(),
            Value::Str(s) => s.chars().count(),
            Value::Tensor(t) => t.data().len(),
            other => return Err(FnError::new(format!("{} has no length", other.type_name()))),
        };
        Ok(Value::Int(n as i64))
    });
    pure(r, "concat", Arity::Exact(2), |a| match (&a[0], &a[1]) {
        (Value::Str(x), Value::Str(y)) => Ok(Value::Str(format!("{x}{y}"))),
        (Value::List(x), Value::List(y)) => Ok(Value::List(x.iter().chain(y).cloned().collect())),
        (x, y) => Err(FnError::new(format!(
            "cannot concatenate {} and {}",
            x.type_name(),
            y.type_name()
        ))),
    });
    pure(r, "slice", Arity::Exact(3), |a| {
        let (start, end) = (args::int(a, 1)?, args::int(a, 2)?);
        match args::any(a, 0)? {
            Value::List(items) => {
                let (s, e) = range(items.len(), start, end)?;
                Ok(Value::List(items[s..e].to_vec()))
            }
            Value::Str(text) => {
                let chars: Vec<char> = text.chars().collect();
                let (s, e) = range(chars.len(), start, end)?;
                Ok(Value::Str(chars[s..e].iter().collect()))
            }
            other => Err(FnError::new(format!("cannot slice a {}", other.type_name()))),
        }
    });
    pure(r, "implant", Arity::Exact(3), |a| {
        implant(args::string(a, 0)?, args::string(a, 1)?, args::int(a, 2)?).map(Value::Str)
    });
    pure(r, "kmer_counts", Arity::Exact(3), |a| {
        let seqs: Vec<&str> = match args::any(a, 0)? {
            Value::Str(s) => vec![s.as_str()],
            _ => args::list(a, 0)?
                .iter()
                .map(|v| v.as_str().ok_or_else(|| FnError::new("argument 1 must hold strings")))
                .collect::<Result<_, _>>()?,
        };
        let counts = kmer_counts(&seqs, args::int(a, 1)?, args::string(a, 2)?)?;
        Ok(Value::List(counts.into_iter().map(|c| Value::Int(c as i64)).collect()))
    });

    pure(r, "tensor_zeros", Arity::Exact(1), |a| {
        let shape = args::list(a, 0)?
            .iter()
            .map(|d| match d.as_i64() {
                Some(d) if d >= 1 => Ok(d as usize),
                _ => Err(FnError::new(format!("dimension {d} must be a positive integer"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if shape.is_empty() {
            return Err(FnError::new("shape is empty"));
        }
        let total = shape.iter().try_fold(1usize, |acc, d| acc.checked_mul(*d));
        if total.is_none_or(|t| t > MAX_TENSOR_ENTRIES) {
            return Err(FnError::new(format!("tensor of shape {shape:?} is too large")));
        }
        Tensor::zeros(shape)
            .map(Value::Tensor)
            .map_err(|e| FnError::new(e.to_string()))
    });
    pure(r, "tensor_fill_rect", Arity::Exact(6), |a| {
        let t = args::tensor(a, 0)?;
        let rect = [
            args::int(a, 1)?,
            args::int(a, 2)?,
            args::int(a, 3)?,
            args::int(a, 4)?,
        ];
        fill_rect(t, rect, args::float(a, 5)?).map(Value::Tensor)
    });

    pure(r, "is_missing", Arity::Exact(1), |a| {
        Ok(Value::Bool(args::any(a, 0)?.is_missing()))
    });
    pure(r, "str", Arity::Exact(1), |a| Ok(Value::Str(csv_cell(args::any(a, 0)?))));
    pure(r, "int", Arity::Exact(1), |a| match args::any(a, 0)? {
        Value::Bool(b) => Ok(Value::Int(*b as i64)),
        Value::Int(i) => Ok(Value::Int(*i)),
        Value::Float(x) => to_int(x.trunc()),
        Value::Str(s) => s
            .trim()
            .parse::<i64>()
            .map(Value::Int)
            .map_err(|_| FnError::new(format!("{s:?} is not an integer"))),
        other => Err(FnError::new(format!("cannot convert {} to int", other.type_name()))),
    });
    pure(r, "float", Arity::Exact(1), |a| match args::any(a, 0)? {
        Value::Bool(b) => Ok(Value::Float(*b as i64 as f64)),
        Value::Str(s) => s
            .trim()
            .parse::<f64>()
            .map(Value::Float)
            .map_err(|_| FnError::new(format!("{s:?} is not a number"))),
        _ => args::float(a, 0).map(Value::Float),
    });
}

fn to_int(x: f64) -> Result<Value, FnError> {
    if (-crate::value::I64_SPAN..crate::value::I64_SPAN).contains(&x) {
        Ok(Value::Int(x as i64))
    } else {
        Err(FnError::new(format!("{x} does not fit an integer")))
    }
}

fn extreme(a: &[Value], smallest: bool) -> Result<Value, FnError> {
    let items: &[Value] = match a {
        [Value::List(items)] => items,
        _ => a,
    };
    let mut best: Option<(&Value, f64)> = None;
    for v in items {
        let x = v
            .as_f64()
            .ok_or_else(|| FnError::new(format!("cannot compare {}", v.type_name())))?;
        let better = match best {
            None => true,
            Some((_, b)) => (smallest && x < b) || (!smallest && x > b),
        };
        if better {
            best = Some((v, x));
        }
    }
    best.map(|(v, _)| v.clone())
        .ok_or_else(|| FnError::new("no values to compare"))
}

fn index(len: usize, i: i64) -> Result<usize, FnError> {
    if i >= 0 && (i as u64) < len as u64 {
        Ok(i as usize)
    } else {
        Err(FnError::new(format!("index {i} out of range for length {len}")))
    }
}

fn range(len: usize, start: i64, end: i64) -> Result<(usize, usize), FnError> {
    if 0 <= start && start <= end && end as u64 <= len as u64 {
        Ok((start as usize, end as usize))
    } else {
        Err(FnError::new(format!(
            "range [{start}, {end}) out of bounds for length {len}"
        )))
    }
}

/// Overwrite `seq[pos .. pos + len(motif)]` with `motif`, by characters.
pub fn implant(seq: &str, motif: &str, pos: i64) -> Result<String, FnError> {
    let mut chars: Vec<char> = seq.chars().collect();
    let motif: Vec<char> = motif.chars().collect();
    let (start, end) = range(chars.len(), pos, pos.saturating_add(motif.len() as i64))
        .map_err(|_| {
            FnError::new(format!(
                "motif of length {} at position {pos} does not fit a sequence of length {}",
                motif.len(),
                chars.len()
            ))
        })?;
    chars.splice(start..end, motif);
    Ok(chars.into_iter().collect())
}

/// Overlapping k-mer counts summed over `seqs`, indexed in lexicographic
/// order of the alphabet as given.
pub fn kmer_counts(seqs: &[&str], k: i64, alphabet: &str) -> Result<Vec<u64>, FnError> {
    if k < 1 {
        return Err(FnError::new(format!("k must be at least 1, got {k}")));
    }
    let letters: Vec<char> = alphabet.chars().collect();
    if letters.is_empty() {
        return Err(FnError::new("alphabet is empty"));
    }
    for (i, c) in letters.iter().enumerate() {
        if letters[..i].contains(c) {
            return Err(FnError::new(format!("alphabet repeats {c:?}")));
        }
    }
    let base = letters.len();
    let space = u32::try_from(k)
        .ok()
        .and_then(|k| base.checked_pow(k))
        .filter(|s| *s <= MAX_KMER_SPACE)
        .ok_or_else(|| FnError::new(format!("{base}^{k} k-mers is too many")))?;
    let k = k as usize;
    let mut counts = vec![0u64; space];
    for seq in seqs {
        let digits = seq
            .chars()
            .map(|c| {
                letters
                    .iter()
                    .position(|l| *l == c)
                    .ok_or_else(|| FnError::new(format!("character {c:?} not in alphabet")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for window in digits.windows(k) {
            let idx = window.iter().fold(0usize, |acc, d| acc * base + d);
            counts[idx] += 1;
        }
    }
    Ok(counts)
}

/// Copy of a 2-D tensor with rows `[r0, r1)` and columns `[c0, c1)` set to `v`.
pub fn fill_rect(t: &Tensor, rect: [i64; 4], v: f64) -> Result<Tensor, FnError> {
    let [rows, cols] = *t.shape() else {
        return Err(FnError::new(format!(
            "needs a 2-D tensor, got shape {:?}",
            t.shape()
        )));
    };
    let [r0, c0, r1, c1] = rect;
    let (r0, r1) = range(rows, r0, r1)
        .map_err(|_| FnError::new(format!("rows [{r0}, {r1}) outside 0..{rows}")))?;
    let (c0, c1) = range(cols, c0, c1)
        .map_err(|_| FnError::new(format!("columns [{c0}, {c1}) outside 0..{cols}")))?;
    let (shape, mut data) = t.clone().into_parts();
    for r in r0..r1 {
        data[r * cols + c0..r * cols + c1].fill(v);
    }
    Tensor::new(shape, data).map_err(|e| FnError::new(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;

    fn call(name: &str, a: Vec<Value>) -> Result<Value, FnError> {
        let registry = FunctionRegistry::with_builtins();
        let mut rng = RandomStream::from_seed(0, name, 0);
        registry.call(name, &a, &mut rng)
    }

    fn ints(xs: &[i64]) -> Value {
        Value::List(xs.iter().map(|x| Value::Int(*x)).collect())
    }

    fn strs(xs: &[&str]) -> Value {
        Value::List(xs.iter().map(|s| Value::Str(s.to_string())).collect())
    }

    /// Count every window of every sequence directly against each k-mer
    /// spelled out in lexicographic order.
    fn kmer_oracle(seqs: &[&str], k: usize, alphabet: &str) -> Vec<u64> {
        let letters: Vec<char> = alphabet.chars().collect();
        let mut kmers = vec![String::new()];
        for _ in 0..k {
            kmers = kmers
                .iter()
                .flat_map(|p| letters.iter().map(move |c| format!("{p}{c}")))
                .collect();
        }
        kmers
            .iter()
            .map(|kmer| {
                seqs.iter()
                    .map(|s| {
                        let chars: Vec<char> = s.chars().collect();
                        chars
                            .windows(k)
                            .filter(|w| w.iter().collect::<String>() == *kmer)
                            .count() as u64
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn kmer_examples() {
        assert_eq!(kmer_counts(&["ACGT"], 1, "ACGT").unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(kmer_counts(&["AAA"], 2, "AC").unwrap(), vec![2, 0, 0, 0]);
        assert_eq!(kmer_counts(&[], 1, "ACGT").unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(kmer_oracle(&["ACGT"], 1, "ACGT"), vec![1, 1, 1, 1]);
        assert_eq!(kmer_oracle(&["AAA"], 2, "AC"), vec![2, 0, 0, 0]);
        let v = call("kmer_counts", vec![strs(&["AAA"]), Value::Int(2), Value::Str("AC".into())]);
        assert_eq!(v.unwrap(), ints(&[2, 0, 0, 0]));
    }

    #[test]
    fn kmer_errors() {
        assert!(kmer_counts(&["AXA"], 1, "AC").is_err());
        assert!(kmer_counts(&["AA"], 0, "AC").is_err());
        assert!(kmer_counts(&["AA"], 2, "AA").is_err());
        assert!(kmer_counts(&["AA"], 40, "ACGT").is_err());
    }

    proptest::proptest! {
        #[test]
        fn kmers_match_window_scan(
            seqs in proptest::collection::vec("[ACG]{0,9}", 0..4),
            k in 1usize..4,
        ) {
            let refs: Vec<&str> = seqs.iter().map(String::as_str).collect();
            proptest::prop_assert_eq!(
                kmer_counts(&refs, k as i64, "ACG").unwrap(),
                kmer_oracle(&refs, k, "ACG")
            );
        }
    }

    #[test]
    fn implant_examples() {
        assert_eq!(implant("AAAA", "CG", 1).unwrap(), "ACGA");
        assert_eq!(implant("AAAA", "", 2).unwrap(), "AAAA");
        assert_eq!(implant("AC", "AC", 0).unwrap(), "AC");
        assert!(implant("AAAA", "CG", 3).is_err());
        assert!(implant("AAAA", "C", -1).is_err());
    }

    #[test]
    fn tensor_primitives() {
        let z = call("tensor_zeros", vec![ints(&[2, 2])]).unwrap();
        let Value::Tensor(t) = &z else { panic!() };
        assert_eq!(t.shape(), &[2, 2]);
        assert_eq!(t.data(), &[0.0; 4]);
        let Value::Tensor(t1) = call("tensor_zeros", vec![ints(&[1])]).unwrap() else { panic!() };
        assert_eq!(t1.data(), &[0.0]);
        assert!(call("tensor_zeros", vec![ints(&[2, 0])]).is_err());
        assert!(call("tensor_zeros", vec![ints(&[])]).is_err());

        let filled = fill_rect(t, [0, 0, 1, 1], 1.0).unwrap();
        assert_eq!(filled.data(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(t.data(), &[0.0; 4], "input must stay untouched");
        assert_eq!(fill_rect(t, [0, 0, 0, 0], 9.0).unwrap(), *t);
        let row = Tensor::zeros(vec![1, 3]).unwrap();
        assert_eq!(fill_rect(&row, [0, 0, 1, 3], 2.0).unwrap().data(), &[2.0; 3]);
        // Row-major: rows [1,3) x cols [1,2) of a 3x2 grid are flat indices 3 and 5.
        let grid = Tensor::zeros(vec![3, 2]).unwrap();
        assert_eq!(
            fill_rect(&grid, [1, 1, 3, 2], 5.0).unwrap().data(),
            &[0.0, 0.0, 0.0, 5.0, 0.0, 5.0]
        );
        assert!(fill_rect(&grid, [0, 0, 4, 1], 1.0).is_err());
        assert!(fill_rect(&grid, [2, 0, 1, 1], 1.0).is_err());
        assert!(fill_rect(&Tensor::zeros(vec![2]).unwrap(), [0, 0, 1, 1], 1.0).is_err());
    }

    #[test]
    fn math_and_sequences() {
        assert_eq!(call("sigmoid", vec![Value::Int(0)]).unwrap(), Value::Float(0.5));
        assert!(call("log", vec![Value::Int(0)]).is_err());
        assert_eq!(call("min", vec![Value::Int(3), Value::Float(1.5)]).unwrap(), Value::Float(1.5));
        assert!(matches!(call("max", vec![ints(&[3, 9, 2])]).unwrap(), Value::Int(9)));
        assert!(matches!(call("clamp", vec![Value::Int(12), Value::Int(0), Value::Int(10)]).unwrap(), Value::Int(10)));
        assert!(matches!(call("round", vec![Value::Float(2.5)]).unwrap(), Value::Int(3)));
        assert!(matches!(call("floor", vec![Value::Float(-0.5)]).unwrap(), Value::Int(-1)));
        assert!(matches!(call("abs", vec![Value::Int(-4)]).unwrap(), Value::Int(4)));
        assert!(matches!(call("get", vec![ints(&[4, 5]), Value::Int(1)]).unwrap(), Value::Int(5)));
        assert!(call("get", vec![ints(&[4, 5]), Value::Int(2)]).is_err());
        assert!(matches!(call("len", vec![Value::Str("héllo".into())]).unwrap(), Value::Int(5)));
        assert_eq!(
            call("concat", vec![Value::Str("ab".into()), Value::Str("c".into())]).unwrap(),
            Value::Str("abc".into())
        );
        assert_eq!(call("concat", vec![ints(&[1]), ints(&[2])]).unwrap(), ints(&[1, 2]));
        assert!(call("concat", vec![ints(&[1]), Value::Str("x".into())]).is_err());
        assert_eq!(call("slice", vec![ints(&[1, 2, 3]), Value::Int(1), Value::Int(3)]).unwrap(), ints(&[2, 3]));
        assert!(matches!(call("sum", vec![ints(&[1, 2, 3])]).unwrap(), Value::Int(6)));
        assert_eq!(call("str", vec![Value::Int(7)]).unwrap(), Value::Str("7".into()));
        assert!(matches!(call("int", vec![Value::Str(" 42".into())]).unwrap(), Value::Int(42)));
        assert_eq!(call("is_missing", vec![Value::Missing]).unwrap(), Value::Bool(true));
    }

    #[test]
    fn choice_and_categorical() {
        let v = call(
            "choice",
            vec![strs(&["a", "b"]), Value::List(vec![Value::Float(0.0), Value::Float(1.0)])],
        )
        .unwrap();
        assert_eq!(v, Value::Str("b".into()));
        assert!(call("choice", vec![strs(&["a"]), ints(&[0, 1])]).is_err());
        assert!(matches!(call("categorical", vec![ints(&[0, 1, 0])]).unwrap(), Value::Int(1)));
    }
}
