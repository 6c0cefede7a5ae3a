//! Randomized Gilbert-Moore points and navigation of the bisection tree over them.
//!
//! Element indices are 0-based here; `ComparisonQuery::boundary_index` keeps the
//! 1-based convention so that `x < x_{n+1}` is the always-true question.

mod path;
mod theta;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

pub use path::NodePath;
pub use theta::{ThetaStream, DEFAULT_THETA_CAP};

use crate::error::{Error, Result};
use crate::numerics::{ProbabilityVector, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Below,
    AtOrAbove,
}

/// "Is `x < x_{boundary_index}`?" with 1-based `boundary_index` in `[1, n+1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComparisonQuery {
    pub boundary_index: usize,
}

impl ComparisonQuery {
    /// Truthful answer when the hidden element has 0-based index `x`.
    pub fn truth(&self, x: usize) -> bool {
        x + 1 < self.boundary_index
    }

    /// True for the questions whose answer does not depend on `x`.
    pub fn is_vacuous(&self, n: usize) -> bool {
        self.boundary_index == 1 || self.boundary_index == n + 1
    }
}

/// Path bit (1 = right half) selected by a "yes" or "no" answer.
pub fn answer_bit(yes: bool) -> bool {
    !yes
}

/// Points `p_i = c_i + theta`, with `c_i = cn_i / D` kept over one integer denominator.
///
/// Each point carries a lazily extended prefix of its binary expansion; every
/// comparison against a dyadic node boundary is a prefix comparison on those bits.
#[derive(Clone, Debug)]
pub struct Placement {
    mu: ProbabilityVector,
    denom: BigInt,
    numers: Vec<BigInt>,
    theta: ThetaStream,
    digits: Vec<NodePath>,
}

pub fn build_placement(mu: &ProbabilityVector, seed: u64) -> Placement {
    Placement::new(mu.clone(), ThetaStream::seeded(seed))
}

impl Placement {
    pub fn new(mu: ProbabilityVector, theta: ThetaStream) -> Self {
        // D = 4 lcm, so that cn_i = 2 sum_{j<i} P_j + P_i with P_j = mu_j * D / 4
        let l = mu.common_denominator();
        let denom = &l * 4;
        let mut numers = Vec::with_capacity(mu.len());
        let mut prefix = BigInt::from(0);
        for p in mu.probs() {
            let pj = p.numer() * (&l / p.denom());
            numers.push(&prefix * 2 + &pj);
            prefix += pj;
        }
        let digits = vec![NodePath::root(); mu.len()];
        Placement { mu, denom, numers, theta, digits }
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &ProbabilityVector {
        &self.mu
    }

    pub fn theta(&self) -> &ThetaStream {
        &self.theta
    }

    pub fn base(&self, i: usize) -> Rational {
        Rational::new(self.numers[i].clone(), self.denom.clone())
    }

    pub fn bases(&self) -> Vec<Rational> {
        (0..self.n()).map(|i| self.base(i)).collect()
    }

    /// `c_i` plus the generated prefix of theta.
    pub fn point_prefix(&self, i: usize) -> Rational {
        self.base(i) + self.theta.prefix_rational()
    }

    /// Makes at least `len` bits of `p_i`'s binary expansion available.
    fn expand(&mut self, i: usize, len: usize) -> Result<()> {
        if self.digits[i].len() >= len {
            return Ok(());
        }
        let e = len.div_ceil(64).max(1) * 64;
        if e >= self.theta.cap() {
            return Err(Error::ThetaCapExceeded { cap: self.theta.cap() });
        }
        self.theta.extend_to((e + 8).min(self.theta.cap()))?;
        loop {
            // p_i lies in [lo, hi] / (D 2^(L+1)) with L generated theta bits
            let l = self.theta.len();
            let lo = (&self.numers[i] << (l + 1)) + &self.denom * BigInt::from(self.theta.prefix_value().clone());
            let scale = &self.denom << (l + 1 - e);
            let floor_lo = &lo / &scale;
            let decided = self.theta.is_exact() || (lo + &self.denom) / &scale == floor_lo;
            if decided {
                let value = floor_lo.to_biguint().expect("points are positive");
                self.digits[i] = NodePath::from_uint(&value, e);
                return Ok(());
            }
            self.theta.extend()?;
        }
    }

    /// Compares the first `key.len()` bits of `p_i` with `key`.
    fn cmp_point(&mut self, i: usize, key: &NodePath) -> Result<Ordering> {
        self.expand(i, key.len())?;
        Ok(self.digits[i].cmp_prefix(key))
    }

    /// Smallest index whose point compares at least `target` against `key`.
    fn partition(&mut self, key: &NodePath, target: Ordering) -> Result<usize> {
        let (mut lo, mut hi) = (0, self.n());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.cmp_point(mid, key)? >= target {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }

    /// Number of points in the left half of `path` or to its left.
    fn midpoint_rank(&mut self, path: &NodePath) -> Result<usize> {
        self.partition(&path.child(true), Ordering::Equal)
    }

    /// The first `len` bits of `p_i`, i.e. its truthful path in the infinite tree.
    pub fn truthful_path(&mut self, i: usize, len: usize) -> Result<NodePath> {
        self.check_index(i)?;
        self.expand(i, len)?;
        Ok(self.digits[i].prefix(len))
    }

    /// Indices `lo..hi` of the points inside `path`'s interval.
    pub fn range(&mut self, path: &NodePath) -> Result<std::ops::Range<usize>> {
        let lo = self.partition(path, Ordering::Equal)?;
        let hi = self.partition(path, Ordering::Greater)?;
        Ok(lo..hi)
    }

    pub fn count(&mut self, path: &NodePath) -> Result<usize> {
        Ok(self.range(path)?.len())
    }

    pub fn point_vs_midpoint(&mut self, i: usize, path: &NodePath) -> Result<Side> {
        self.check_index(i)?;
        Ok(if i >= self.midpoint_rank(path)? { Side::AtOrAbove } else { Side::Below })
    }

    pub fn to_comparison(&mut self, path: &NodePath) -> Result<ComparisonQuery> {
        Ok(ComparisonQuery { boundary_index: self.midpoint_rank(path)? + 1 })
    }

    /// The truthful path bit at `path` for element `i`, whose point must lie in `path`.
    pub fn truthful_bit(&mut self, i: usize, path: &NodePath) -> Result<bool> {
        self.check_index(i)?;
        if !self.range(path)?.contains(&i) {
            return Err(Error::Precondition(format!("point {} is outside node {path}", i + 1)));
        }
        Ok(self.point_vs_midpoint(i, path)? == Side::AtOrAbove)
    }

    /// The shallowest node isolating `p_i`, and its depth.
    pub fn finite_leaf(&mut self, i: usize) -> Result<(NodePath, usize)> {
        self.check_index(i)?;
        let mut path = NodePath::root();
        while self.count(&path)? > 1 {
            let bit = self.point_vs_midpoint(i, &path)? == Side::AtOrAbove;
            path.push(bit);
        }
        let depth = path.len();
        Ok((path, depth))
    }

    pub fn is_finite_leaf(&mut self, path: &NodePath) -> Result<bool> {
        match self.count(path)? {
            0 => Err(Error::EmptyInterval(path.to_string())),
            1 => match path.parent() {
                None => Ok(true),
                Some(parent) => Ok(self.count(&parent)? >= 2),
            },
            _ => Ok(false),
        }
    }

    /// The element whose leaf is `path`, if `path` is a leaf of the finite tree.
    pub fn leaf_element(&mut self, path: &NodePath) -> Result<Option<usize>> {
        let range = self.range(path)?;
        if range.len() != 1 {
            return Ok(None);
        }
        let parent_count = match path.parent() {
            None => 2,
            Some(p) => self.count(&p)?,
        };
        Ok((parent_count >= 2).then_some(range.start))
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n() {
            Ok(())
        } else {
            Err(Error::Precondition(format!("element index {} outside 1..={}", i + 1, self.n())))
        }
    }
}

/// `ceil(log2(4 / mu_i))`, the largest depth a finite leaf may have.
pub fn leaf_depth_limit(mu_i: &Rational) -> usize {
    let ratio = Rational::from_integer(BigInt::from(4)) / mu_i;
    let mut d = 0;
    let mut pow = Rational::one();
    while pow < ratio {
        pow *= Rational::from_integer(BigInt::from(2));
        d += 1;
    }
    d
}
