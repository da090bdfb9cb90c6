//! Random variate generators.
//!
//! Every generator consumes a fixed number of raw draws per call, listed on
//! each function, so a node's draw counter advances predictably. Discrete
//! distributions use inversion on a single uniform.

use std::f64::consts::TAU;

use super::FnError;
use crate::rng::RandomStream;

// Inversion windows skip tails with mass below ~e^-70.
const TAIL_SDS: f64 = 12.0;
const MAX_POISSON_MEAN: f64 = 1e12;

fn domain(message: impl Into<String>) -> FnError {
    FnError::new(message)
}

/// Continuous uniform on `[a, b)`; `a == b` yields `a`. One draw.
pub fn uniform(rng: &mut RandomStream, a: f64, b: f64) -> Result<f64, FnError> {
    if !a.is_finite() || !b.is_finite() {
        return Err(domain("bounds must be finite"));
    }
    if a > b {
        return Err(domain(format!("lower bound {a} exceeds upper bound {b}")));
    }
    let u = rng.next_unit();
    let x = a + (b - a) * u;
    Ok(if x >= b && a < b { b.next_down() } else { x })
}

/// Gaussian via Box-Muller, cosine branch only. Two draws.
pub fn normal(rng: &mut RandomStream, mu: f64, sigma: f64) -> Result<f64, FnError> {
    if !mu.is_finite() || !sigma.is_finite() || sigma < 0.0 {
        return Err(domain(format!("needs finite mu and sigma >= 0, got ({mu}, {sigma})")));
    }
    let u1 = rng.next_unit();
    let u2 = rng.next_unit();
    let radius = (-2.0 * (1.0 - u1).ln()).sqrt();
    Ok(mu + sigma * radius * (TAU * u2).cos())
}

fn check_probability(p: f64) -> Result<(), FnError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(domain(format!("probability {p} outside [0, 1]")))
    }
}

/// 1 with probability `p`, else 0. One draw.
pub fn bernoulli(rng: &mut RandomStream, p: f64) -> Result<i64, FnError> {
    binomial(rng, 1, p)
}

/// Successes in `n` Bernoulli(`p`) trials. One draw.
pub fn binomial(rng: &mut RandomStream, n: i64, p: f64) -> Result<i64, FnError> {
    check_probability(p)?;
    if n < 0 {
        return Err(domain(format!("trial count {n} is negative")));
    }
    let u = rng.next_unit();
    if p == 0.0 || n == 0 {
        return Ok(0);
    }
    if p == 1.0 {
        return Ok(n);
    }
    let nf = n as f64;
    let mean = nf * p;
    let sd = (mean * (1.0 - p)).sqrt();
    let lo = (mean - TAIL_SDS * sd - TAIL_SDS).floor().max(0.0) as i64;
    let hi = ((mean + TAIL_SDS * sd + TAIL_SDS).ceil() as i64).min(n);
    let odds = p / (1.0 - p);
    let mut pmf = if lo == 0 {
        (n as f64 * (-p).ln_1p()).exp()
    } else {
        let k = lo as f64;
        (ln_choose(nf, k) + k * p.ln() + (nf - k) * (-p).ln_1p()).exp()
    };
    let mut cdf = 0.0;
    let mut k = lo;
    loop {
        cdf += pmf;
        if u < cdf || k >= hi {
            return Ok(k);
        }
        pmf *= (n - k) as f64 / (k + 1) as f64 * odds;
        k += 1;
    }
}

/// Poisson with mean `lam`. One draw.
pub fn poisson(rng: &mut RandomStream, lam: f64) -> Result<i64, FnError> {
    if !(0.0..=MAX_POISSON_MEAN).contains(&lam) {
        return Err(domain(format!("mean {lam} outside [0, {MAX_POISSON_MEAN:e}]")));
    }
    let u = rng.next_unit();
    if lam == 0.0 {
        return Ok(0);
    }
    let sd = lam.sqrt();
    let lo = (lam - TAIL_SDS * sd - TAIL_SDS).floor().max(0.0) as i64;
    let hi = (lam + TAIL_SDS * sd + TAIL_SDS).ceil() as i64;
    let mut pmf = if lo == 0 {
        (-lam).exp()
    } else {
        let k = lo as f64;
        (-lam + k * lam.ln() - libm::lgamma(k + 1.0)).exp()
    };
    let mut cdf = 0.0;
    let mut k = lo;
    loop {
        cdf += pmf;
        if u < cdf || k >= hi {
            return Ok(k);
        }
        k += 1;
        pmf *= lam / k as f64;
    }
}

/// Uniform integer on `[lo, hi)`; `lo == hi` yields `lo`. One draw.
pub fn randint(rng: &mut RandomStream, lo: i64, hi: i64) -> Result<i64, FnError> {
    if lo > hi {
        return Err(domain(format!("empty range [{lo}, {hi})")));
    }
    let width = (hi as i128 - lo as i128) as u64;
    if width == 0 {
        rng.next_raw();
        return Ok(lo);
    }
    Ok((lo as i128 + rng.next_below(width) as i128) as i64)
}

/// Index drawn with the given probabilities. One draw.
pub fn categorical(rng: &mut RandomStream, probs: &[f64]) -> Result<usize, FnError> {
    if probs.is_empty() {
        return Err(domain("probability list is empty"));
    }
    if let Some(bad) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(domain(format!("probability {bad} is not a finite non-negative number")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(domain(format!("probabilities sum to {total}, not 1")));
    }
    let u = rng.next_unit();
    let mut cdf = 0.0;
    for (i, p) in probs.iter().enumerate() {
        cdf += p;
        if u < cdf {
            return Ok(i);
        }
    }
    // Rounding left u above the final partial sum.
    Ok(probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1))
}

/// `length` characters drawn uniformly from `alphabet`. One draw per character.
pub fn random_seq(rng: &mut RandomStream, alphabet: &str, length: i64) -> Result<String, FnError> {
    let letters: Vec<char> = alphabet.chars().collect();
    if letters.is_empty() {
        return Err(domain("alphabet is empty"));
    }
    if length < 0 {
        return Err(domain(format!("length {length} is negative")));
    }
    Ok((0..length)
        .map(|_| letters[rng.next_below(letters.len() as u64) as usize])
        .collect())
}

fn ln_choose(n: f64, k: f64) -> f64 {
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}
