//! Closed-form bound calculators assembled into one report.

use serde::Serialize;

use super::entropy::{entropy, h2, h3, kl_divergence, lower_bound, OLOG_C};
use super::prob::ProbabilityVector;
use super::radius::{
    convergence_partial_sum, convergence_partial_sum_rprime, max_depth_bound, radius_r, RadiusTable,
    RadiusKind, MAX_DEPTH_C_PRIME,
};
use super::rational::{log2_rational, to_f64};
use crate::error::Result;

/// Truncation point of the convergent series used as additive constants.
pub const SERIES_TERMS: u64 = 100_000;

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub k: u32,
    pub entropy: f64,
    pub h2: f64,
    pub h3: f64,
    /// Clamped lower bound on the optimal expected cost of any k-valid tree.
    pub lower_bound: f64,
    /// Unclamped lower bound; absent when some `log log 1/mu_i` is undefined.
    pub lower_bound_raw: Option<f64>,
    pub ub_algo1: f64,
    pub ub_algo2: f64,
    pub kl_divergence: Option<f64>,
    pub constants: BoundConstants,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundConstants {
    pub olog_c: f64,
    pub depth_c_prime: f64,
    pub series_terms: u64,
    /// `sum_d binom_leq(r(d),k) (r(d)+2k+1) 2^-r(d)`.
    pub algo1_series: f64,
    /// `sum_m k (r'(m)+1) 2^-r'(m)`; zero when `k = 0`.
    pub algo2_series: f64,
}

/// Per-element depth allowance `log2(1/mu_i) + 3`.
fn depth_allowance(mu_i: &super::rational::Rational) -> f64 {
    -log2_rational(mu_i) + 3.0
}

/// Expected-cost ceiling of the first algorithm against any adversary with at most `k` lies:
/// `sum mu_i [q_i + (k+1) r(floor q_i) + k(2k+1)] + S1`, `q_i = log2(1/mu_i) + 3`.
pub fn upper_bound_algo1(mu: &ProbabilityVector, k: u32, series: f64) -> f64 {
    let kk = k as f64;
    mu.probs()
        .iter()
        .map(|p| {
            let q = depth_allowance(p);
            let r = radius_r(q.floor().max(1.0) as u64, k) as f64;
            to_f64(p) * (q + (kk + 1.0) * r + kk * (2.0 * kk + 1.0))
        })
        .sum::<f64>()
        + series
}

/// Expected-cost ceiling of the second algorithm:
/// `sum mu_i [q_i + k (r'(M_i) + 1)] + 2(3k+1) + S2`, `M_i` the depth bound.
pub fn upper_bound_algo2(mu: &ProbabilityVector, k: u32, series: f64) -> f64 {
    let kk = k as f64;
    let mut table = RadiusTable::new(RadiusKind::Stack, k);
    mu.probs()
        .iter()
        .map(|p| {
            let m = max_depth_bound(p, k).max(1);
            to_f64(p) * (depth_allowance(p) + kk * (table.get(m) as f64 + 1.0))
        })
        .sum::<f64>()
        + 2.0 * (3.0 * kk + 1.0)
        + series
}

pub fn bounds_report(mu: &ProbabilityVector, k: u32, eta: Option<&ProbabilityVector>) -> Result<BoundsReport> {
    let algo1_series = convergence_partial_sum(k, SERIES_TERMS);
    let algo2_series = if k == 0 { 0.0 } else { convergence_partial_sum_rprime(k, SERIES_TERMS) };
    Ok(BoundsReport {
        k,
        entropy: entropy(mu),
        h2: h2(mu),
        h3: h3(mu),
        lower_bound: lower_bound(mu, k, true)?,
        lower_bound_raw: lower_bound(mu, k, false).ok(),
        ub_algo1: upper_bound_algo1(mu, k, algo1_series),
        ub_algo2: upper_bound_algo2(mu, k, algo2_series),
        kl_divergence: eta.map(|e| kl_divergence(mu, e)).transpose()?,
        constants: BoundConstants {
            olog_c: OLOG_C,
            depth_c_prime: MAX_DEPTH_C_PRIME,
            series_terms: SERIES_TERMS,
            algo1_series,
            algo2_series,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_eight_no_lies() {
        let mu = ProbabilityVector::uniform(8).unwrap();
        let r = bounds_report(&mu, 0, None).unwrap();
        assert!((r.entropy - 3.0).abs() < 1e-12);
        assert!(r.lower_bound >= 2.0 - 1e-12);
        assert!(r.lower_bound <= r.ub_algo2);
    }

    #[test]
    fn lower_below_upper_across_regime() {
        for spec in ["uniform:2", "uniform:16", "uniform:1024", "dyadic:6", "geometric:20,1/3"] {
            let mu = ProbabilityVector::from_spec(spec).unwrap();
            for k in 0..=4 {
                let r = bounds_report(&mu, k, None).unwrap();
                assert!(r.entropy >= 0.0);
                assert!(r.lower_bound <= r.ub_algo2, "{spec} k={k}");
                assert!(r.lower_bound <= r.ub_algo1, "{spec} k={k}");
            }
        }
    }

    #[test]
    fn point_mass_entropy_zero() {
        let r = bounds_report(&ProbabilityVector::uniform(1).unwrap(), 1, None).unwrap();
        assert_eq!(r.entropy, 0.0);
        assert!(r.lower_bound_raw.is_none());
    }
}
