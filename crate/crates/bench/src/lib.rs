//! Shared fixtures for the criterion benches.

use liarsearch::numerics::ProbabilityVector;
use liarsearch::placement::{build_placement, Placement};

pub fn uniform(n: usize) -> ProbabilityVector {
    ProbabilityVector::uniform(n).expect("n > 0")
}

/// A fresh placement per iteration, so lazily extended theta bits are part of the cost.
pub fn placement(mu: &ProbabilityVector, seed: u64) -> Placement {
    build_placement(mu, seed)
}
