use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::Rational;

pub fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `sum_{l <= min(k, n)} C(n, l)`: the number of subsets of an `n`-set with at most `k` members.
pub fn binom_leq(n: u64, k: u64) -> BigInt {
    let mut term = BigInt::one();
    let mut total = BigInt::one();
    for l in 0..k.min(n) {
        term *= n - l;
        term /= l + 1;
        total += &term;
    }
    total
}

/// `log2 binom_leq(n, k)` in floating point, for radii far beyond exact convenience.
pub fn log2_binom_leq(n: u64, k: u64) -> f64 {
    // Terms grow while l < n/2, so the largest is the last one kept; sum relative to it.
    let top = k.min(n);
    let mut logs = Vec::with_capacity(top as usize + 1);
    let mut log_term = 0.0f64;
    logs.push(0.0);
    for l in 0..top {
        log_term += ((n - l) as f64).log2() - ((l + 1) as f64).log2();
        logs.push(log_term);
    }
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + logs.iter().map(|x| (x - max).exp2()).sum::<f64>().log2()
}

/// Exact `sum 2^-d` over leaf depths.
pub fn kraft_sum(depths: &[u32]) -> Rational {
    let max = depths.iter().copied().max().unwrap_or(0);
    let num: BigInt = depths.iter().map(|&d| BigInt::one() << (max - d)).sum();
    Rational::new(num, BigInt::one() << max)
}

/// Smallest `x` guaranteed to satisfy `x >= a ln x + b` for `a, b >= e`.
pub fn log_inequality_threshold(a: f64, b: f64) -> f64 {
    b + 4.0 * a * (a.ln() + b.ln())
}
