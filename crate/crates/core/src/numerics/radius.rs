//! Verification radii for the two resilient searches, and the series built from them.
//!
//! Both radii take `k = 0` as `k = 1`. Real arithmetic is f64; the final ceiling
//! subtracts `2^-40` so that float noise just above an integer does not bump the result.

use std::f64::consts::{E, LN_2};
use std::sync::Arc;

use super::combinatorics::log2_binom_leq;
use super::entropy::olog;
use super::rational::{log2_rational, Rational};

const CEIL_SLACK: f64 = 1.0 / (1u64 << 40) as f64;

/// Constant `C'` with `r'(j) <= a olog(j) + a`, `a = C' olog(k)`, for all `j <= 10^6`, `k <= 64`.
pub const MAX_DEPTH_C_PRIME: f64 = 2.0;

/// Constant with `r(d) - log2(d+1) <= C (k log2 olog d + k log2 olog k + 1)` for `d <= 10^5`, `k <= 8`.
pub const R_GROWTH_C: f64 = 17.5;

/// Constant with `r'(j) <= log2 j + C (olog k + log2 olog j)` for `j <= 10^5`, `k <= 8`.
pub const RPRIME_GROWTH_C: f64 = 7.25;

fn ceil_slack(x: f64) -> u64 {
    (x - CEIL_SLACK).ceil().max(0.0) as u64
}

fn effective_k(k: u32) -> f64 {
    k.max(1) as f64
}

/// `(d+1) ln^2(d+1)`.
fn growth_argument(d: u64) -> f64 {
    let x = (d + 1) as f64;
    x * x.ln() * x.ln()
}

/// The first-algorithm radius before the running maximum, with `olog` standing in
/// for every logarithm whose argument can drop below 2.
fn radius_r_raw(d: u64, k: u32) -> u64 {
    let k = effective_k(k);
    let a = growth_argument(d);
    let l = olog(a);
    let value = l + 4.0 * (k + 1.0) * (l.log2() + 4.0 * ((k + 1.0) / LN_2).log2());
    ceil_slack(value).max(2 * k as u64 + 1)
}

fn radius_rprime_raw(j: u64, k: u32) -> u64 {
    let k = effective_k(k);
    let a = 2.0 * k * growth_argument(j);
    let value = a.log2() + E + 4.0 * E * (1.0 + (a + E).log2().ln());
    ceil_slack(value).max(1)
}

/// `r(d)`; nondecreasing in `d` and at least `2k+1`.
pub fn radius_r(d: u64, k: u32) -> u64 {
    assert!(d >= 1, "radius_r needs d >= 1");
    (1..=d).map(|x| radius_r_raw(x, k)).max().unwrap()
}

/// `r'(j)`; nondecreasing in `j`.
pub fn radius_rprime(j: u64, k: u32) -> u64 {
    assert!(j >= 1, "radius_rprime needs j >= 1");
    (1..=j).map(|x| radius_rprime_raw(x, k)).max().unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusKind {
    /// `r(d)` of the first algorithm.
    Majority,
    /// `r'(j)` of the second algorithm.
    Stack,
}

/// Memoized radius values for one `k`, with an optional constant override used for
/// mutation testing.
#[derive(Clone, Debug)]
pub struct RadiusTable {
    kind: RadiusKind,
    k: u32,
    constant: Option<u64>,
    // values[d] = radius(d); index 0 unused
    values: Vec<u64>,
}

impl RadiusTable {
    pub fn new(kind: RadiusKind, k: u32) -> Self {
        RadiusTable { kind, k, constant: None, values: vec![0] }
    }

    pub fn constant(kind: RadiusKind, k: u32, value: u64) -> Self {
        RadiusTable { kind, k, constant: Some(value), values: vec![0] }
    }

    pub fn is_override(&self) -> bool {
        self.constant.is_some()
    }

    pub fn get(&mut self, d: u64) -> u64 {
        if let Some(c) = self.constant {
            return c;
        }
        let d = d.max(1) as usize;
        while self.values.len() <= d {
            let x = self.values.len() as u64;
            let raw = match self.kind {
                RadiusKind::Majority => radius_r_raw(x, self.k),
                RadiusKind::Stack => radius_rprime_raw(x, self.k),
            };
            let prev = *self.values.last().unwrap();
            self.values.push(raw.max(prev));
        }
        self.values[d]
    }
}

/// A precomputed, cheaply cloneable radius lookup shared by forked search states.
#[derive(Clone, Debug)]
pub struct Radii {
    kind: RadiusKind,
    k: u32,
    constant: Option<u64>,
    table: Arc<Vec<u64>>,
}

impl Radii {
    /// Precomputes the radius for depths `1..=upto`; deeper lookups are computed on demand.
    pub fn new(kind: RadiusKind, k: u32, upto: u64) -> Self {
        let mut t = RadiusTable::new(kind, k);
        let table = (0..=upto).map(|d| if d == 0 { 0 } else { t.get(d) }).collect();
        Radii { kind, k, constant: None, table: Arc::new(table) }
    }

    pub fn constant(kind: RadiusKind, k: u32, value: u64) -> Self {
        Radii { kind, k, constant: Some(value), table: Arc::new(Vec::new()) }
    }

    pub fn kind(&self) -> RadiusKind {
        self.kind
    }

    pub fn is_override(&self) -> bool {
        self.constant.is_some()
    }

    pub fn get(&self, d: u64) -> u64 {
        if let Some(c) = self.constant {
            return c;
        }
        let d = d.max(1);
        match self.table.get(d as usize) {
            Some(&r) => r,
            None => match self.kind {
                RadiusKind::Majority => radius_r(d, self.k),
                RadiusKind::Stack => radius_rprime(d, self.k),
            },
        }
    }
}

/// `sum_{d=1}^{dmax} binom_leq(r(d), k) (r(d) + 2k + 1) 2^-r(d)`.
pub fn convergence_partial_sum(k: u32, dmax: u64) -> f64 {
    let mut table = RadiusTable::new(RadiusKind::Majority, k);
    (1..=dmax)
        .map(|d| {
            let r = table.get(d);
            let log_term = log2_binom_leq(r, k as u64) + ((r + 2 * k as u64 + 1) as f64).log2() - r as f64;
            log_term.exp2()
        })
        .sum()
}

/// `sum_{m=1}^{mmax} 2^-r'(m) k (r'(m) + 1)`, with `k` taken as at least 1.
pub fn convergence_partial_sum_rprime(k: u32, mmax: u64) -> f64 {
    let mut table = RadiusTable::new(RadiusKind::Stack, k);
    let kf = effective_k(k);
    (1..=mmax)
        .map(|m| {
            let r = table.get(m);
            (kf.log2() + ((r + 1) as f64).log2() - r as f64).exp2()
        })
        .sum()
}

/// Slope `a = C' olog(k)` of the depth recursion.
pub fn depth_slope(k: u32) -> f64 {
    MAX_DEPTH_C_PRIME * olog(effective_k(k))
}

/// The sequence `q_0 = log2(1/mu_i) + 3`, `q_{j+1} = q_j + a olog(q_j) + a`, up to `q_steps`.
pub fn depth_sequence(mu_i: &Rational, k: u32, steps: usize) -> Vec<f64> {
    let a = depth_slope(k);
    let mut q = vec![-log2_rational(mu_i) + 3.0];
    for _ in 0..steps {
        let last = *q.last().unwrap();
        q.push(last + a * olog(last) + a);
    }
    q
}

/// Upper bound on the deepest node the second algorithm's pointer ever reaches when
/// searching for an element of probability `mu_i` with lie budget `k`.
pub fn max_depth_bound(mu_i: &Rational, k: u32) -> u64 {
    let steps = k.max(1) as usize;
    let q = depth_sequence(mu_i, k, steps);
    q[steps].floor() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rational;

    #[test]
    fn rprime_one_one_is_24() {
        assert_eq!(radius_rprime(1, 1), 24);
        assert_eq!(radius_rprime(1, 0), 24);
    }

    #[test]
    fn r_one_pins() {
        // direct evaluation: olog(2 ln^2 2) + 4(k+1)(log2 olog(2 ln^2 2) + 4 log2((k+1)/ln 2))
        let a = 2.0 * LN_2 * LN_2;
        let l = (a + 16.0).log2();
        for (k, pinned) in [(1u32, 70u64), (2, 130), (3, 199)] {
            let kk = k as f64;
            let direct = (l + 4.0 * (kk + 1.0) * (l.log2() + 4.0 * ((kk + 1.0) / LN_2).log2())).ceil() as u64;
            assert_eq!(radius_r(1, k), direct);
            assert_eq!(radius_r(1, k), pinned);
        }
        assert_eq!(radius_r(1, 0), radius_r(1, 1));
    }

    #[test]
    fn radii_monotone() {
        for k in 1..=3 {
            let mut a = RadiusTable::new(RadiusKind::Majority, k);
            let mut b = RadiusTable::new(RadiusKind::Stack, k);
            let mut prev = (0, 0);
            for d in 1..=10_000 {
                let cur = (a.get(d), b.get(d));
                assert!(cur.0 >= prev.0 && cur.1 >= prev.1, "d={d} k={k}");
                assert!(cur.0 > 2 * k as u64);
                prev = cur;
            }
            assert_eq!(a.get(500), radius_r(500, k));
            let shared = Radii::new(RadiusKind::Majority, k, 100);
            assert_eq!(shared.get(100), a.get(100));
            assert_eq!(shared.get(700), a.get(700));
            assert_eq!(b.get(500), radius_rprime(500, k));
        }
    }

    #[test]
    fn r_growth_constant_holds() {
        for k in 1..=8u32 {
            let mut t = RadiusTable::new(RadiusKind::Majority, k);
            let kk = k as f64;
            for d in 1..=100_000u64 {
                let lhs = t.get(d) as f64 - ((d + 1) as f64).log2();
                let rhs = R_GROWTH_C * (kk * olog(d as f64).log2() + kk * olog(kk).log2() + 1.0);
                assert!(lhs <= rhs, "d={d} k={k} lhs={lhs} rhs={rhs}");
            }
        }
    }

    #[test]
    fn rprime_self_consistency_and_growth() {
        for k in 1..=3u32 {
            let mut t = RadiusTable::new(RadiusKind::Stack, k);
            let kk = k as f64;
            for j in 1..=100_000u64 {
                let r = t.get(j) as f64;
                let a = 2.0 * kk * growth_argument(j);
                assert!(r >= r.log2() + a.log2(), "j={j} k={k}");
            }
        }
        for k in 1..=8u32 {
            let mut t = RadiusTable::new(RadiusKind::Stack, k);
            let kk = k as f64;
            for j in 1..=100_000u64 {
                let rhs = (j as f64).log2() + RPRIME_GROWTH_C * (olog(kk) + olog(j as f64).log2());
                assert!(t.get(j) as f64 <= rhs, "j={j} k={k}");
            }
        }
    }

    #[test]
    fn depth_slope_dominates_rprime() {
        for k in 1..=64u32 {
            let mut t = RadiusTable::new(RadiusKind::Stack, k);
            let a = depth_slope(k);
            let mut j = 1u64;
            while j <= 1_000_000 {
                assert!(t.get(j) as f64 <= a * olog(j as f64) + a, "j={j} k={k}");
                j = if j < 1000 { j + 1 } else { j + j / 50 };
            }
        }
    }

    #[test]
    fn depth_sequence_growth_lemma() {
        for k in [1u32, 2, 3, 5] {
            for den in [2i64, 16, 1024, 1 << 20] {
                let mu = rational(1, den);
                let q = depth_sequence(&mu, k, 20);
                let a = depth_slope(k);
                for (i, qi) in q.iter().enumerate().skip(1) {
                    let i = i as f64;
                    let rhs = q[0] + 8.0 * a * i * (olog(q[0]) + olog(a) + olog(i) + 1.0);
                    assert!(*qi <= rhs);
                }
            }
        }
    }

    #[test]
    fn max_depth_bound_monotone() {
        let mut prev_k = 0;
        for k in 0..=5 {
            let b = max_depth_bound(&rational(1, 64), k);
            assert!(b >= prev_k);
            prev_k = b;
        }
        let mut prev_mu = 0;
        for den in [1i64, 2, 3, 8, 100, 4096] {
            let b = max_depth_bound(&rational(1, den), 2);
            assert!(b >= prev_mu);
            prev_mu = b;
        }
    }

    #[test]
    fn convergence_examples() {
        assert_eq!(convergence_partial_sum(1, 0), 0.0);
        for k in 1..=3 {
            let s4 = convergence_partial_sum(k, 10_000);
            let s5 = convergence_partial_sum(k, 100_000);
            assert!(s5 >= s4 && s5 - s4 < 1e-3 && s5 <= 4.0);
        }
    }
}
