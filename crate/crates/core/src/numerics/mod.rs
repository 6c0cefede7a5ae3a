//! Exact arithmetic, entropy functionals, radius functions and combinatorics.

pub mod bounds;
pub mod combinatorics;
pub mod entropy;
pub mod prob;
pub mod radius;
pub mod rational;

pub use bounds::{bounds_report, BoundsReport};
pub use combinatorics::{binom, binom_leq, kraft_sum};
pub use entropy::{entropy, h2, h3, kl_divergence, lower_bound, olog};
pub use prob::ProbabilityVector;
pub use radius::{
    convergence_partial_sum, convergence_partial_sum_rprime, max_depth_bound, radius_r, radius_rprime, Radii, RadiusKind,
};
pub use rational::{Dyadic, Rational};
