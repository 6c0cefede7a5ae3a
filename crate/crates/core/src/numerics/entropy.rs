//! Entropy functionals and the information-theoretic lower bound.

use super::prob::ProbabilityVector;
use super::rational::{log2_rational, to_f64};
use crate::error::{Error, Result};

/// Offset inside [`olog`]; the smallest power of two with `log log log C > 0`.
pub const OLOG_C: f64 = 16.0;

/// `log2(x + C)`; at least 4 for every `x >= 0`.
pub fn olog(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "olog of negative {x}");
    (x + OLOG_C).log2()
}

/// `olog(2^s)` without overflowing for large `s`.
pub fn olog_exp2(s: f64) -> f64 {
    if s > 60.0 {
        s + (OLOG_C * (-s).exp2()).ln_1p() / std::f64::consts::LN_2
    } else {
        olog(s.exp2())
    }
}

/// `(mu_i, log2(1/mu_i))` pairs computed from exact rationals.
fn weighted_surprisals(mu: &ProbabilityVector) -> impl Iterator<Item = (f64, f64)> + '_ {
    // 0.0 - x keeps a certain outcome at +0 rather than -0
    mu.probs().iter().map(|p| (to_f64(p), 0.0 - log2_rational(p)))
}

pub fn entropy(mu: &ProbabilityVector) -> f64 {
    weighted_surprisals(mu).map(|(p, s)| p * s).sum()
}

/// `sum mu_i log2 olog(1/mu_i)`.
pub fn h2(mu: &ProbabilityVector) -> f64 {
    weighted_surprisals(mu).map(|(p, s)| p * olog_exp2(s).log2()).sum()
}

/// `sum mu_i log2 log2 olog(1/mu_i)`.
pub fn h3(mu: &ProbabilityVector) -> f64 {
    weighted_surprisals(mu).map(|(p, s)| p * olog_exp2(s).log2().log2()).sum()
}

/// `k log2 k` with `0 log 0 = 0`.
pub fn k_log_k(k: u32) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * (k as f64).log2()
    }
}

/// `E[log 1/mu] + k E[log log 1/mu] - (k log k + k + 1)`.
///
/// In clamped mode every `log log` term is floored at zero and so is the result.
/// Unclamped evaluation fails when some `log log 1/mu_i` is undefined (`mu_i = 1`).
pub fn lower_bound(mu: &ProbabilityVector, k: u32, clamped: bool) -> Result<f64> {
    let mut h = 0.0;
    let mut loglog = 0.0;
    for (p, s) in weighted_surprisals(mu) {
        h += p * s;
        if k == 0 {
            continue;
        }
        let ll = s.log2();
        let term = if clamped {
            if ll.is_finite() { ll.max(0.0) } else { 0.0 }
        } else if ll.is_finite() {
            ll
        } else {
            return Err(Error::Domain(format!(
                "log log 1/mu undefined for mu = {p} (use clamped mode)"
            )));
        };
        loglog += p * term;
    }
    let value = h + k as f64 * loglog - (k_log_k(k) + k as f64 + 1.0);
    Ok(if clamped { value.max(0.0) } else { value })
}

/// `D(mu || eta)` in bits.
pub fn kl_divergence(mu: &ProbabilityVector, eta: &ProbabilityVector) -> Result<f64> {
    if mu.labels() != eta.labels() {
        return Err(Error::Domain("mu and eta must share the same ordered labels".into()));
    }
    Ok(mu
        .probs()
        .iter()
        .zip(eta.probs())
        .map(|(m, e)| to_f64(m) * log2_rational(&(m / e)))
        .sum())
}
