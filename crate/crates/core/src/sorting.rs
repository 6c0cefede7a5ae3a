//! Insertion sort against a lying comparator. Each insertion is a distributional search
//! over the insertion slots, with the slot distribution supplied by a permutation prior.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adversary::AnswerSource;
use crate::algo2::{default_radii, Algo2};
use crate::error::{Error, Result};
use crate::numerics::rational::parse_rational;
use crate::numerics::{entropy, ProbabilityVector, Rational};
use crate::placement::{build_placement, Placement};
use crate::protocol::{drive, Poll, Protocol};

/// Permutation priors that factor over insertions: the slot of the `m`-th inserted item
/// is independent of the order of the earlier ones.
#[derive(Clone, Debug, PartialEq)]
pub enum Prior {
    Uniform,
    /// Slot `s` of `m` has weight `q^(m-1-s)`; `q < 1` favours appending.
    Mallows(Rational),
}

pub fn uniform_prior() -> Prior {
    Prior::Uniform
}

pub fn mallows_prior(q: Rational) -> Result<Prior> {
    if !q.is_positive() {
        return Err(Error::Domain(format!("mallows dispersion must be positive, got {q}")));
    }
    Ok(Prior::Mallows(q))
}

impl Prior {
    /// Distribution over the `slots` insertion points, leftmost first.
    pub fn slot_distribution(&self, slots: usize) -> Result<ProbabilityVector> {
        match self {
            Prior::Uniform => ProbabilityVector::uniform(slots),
            Prior::Mallows(q) => {
                let mut weights = vec![Rational::one(); slots];
                for s in (0..slots.saturating_sub(1)).rev() {
                    weights[s] = &weights[s + 1] * q;
                }
                let total: Rational = weights.iter().sum();
                ProbabilityVector::from_probs(weights.into_iter().map(|w| w / &total).collect())
            }
        }
    }

    /// Draws an ordering by sequential insertion: `result[i]` is the rank of item `i`.
    pub fn sample(&self, n: usize, rng: &mut impl Rng) -> Result<Vec<usize>> {
        let mut order: Vec<usize> = Vec::with_capacity(n);
        for i in 0..n {
            let slot = self.slot_distribution(i + 1)?.sample_index(rng.random::<f64>());
            order.insert(slot, i);
        }
        let mut ranks = vec![0; n];
        for (r, &i) in order.iter().enumerate() {
            ranks[i] = r;
        }
        Ok(ranks)
    }
}

impl fmt::Display for Prior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prior::Uniform => write!(f, "uniform"),
            Prior::Mallows(q) => write!(f, "mallows:{q}"),
        }
    }
}

impl FromStr for Prior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "uniform" => Ok(Prior::Uniform),
            Some(("mallows", q)) => mallows_prior(parse_rational(q)?),
            _ => Err(Error::Config(format!("unknown prior {s:?}, expected uniform or mallows:Q"))),
        }
    }
}

/// Entropy of the whole permutation, by the chain rule over insertions.
pub fn permutation_entropy(prior: &Prior, n: usize) -> Result<f64> {
    (1..=n).map(|m| prior.slot_distribution(m).map(|d| entropy(&d))).sum()
}

/// "Is item `a` smaller than item `b`?"
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairQuestion {
    pub a: usize,
    pub b: usize,
}

impl PairQuestion {
    pub fn truth<T: Ord>(&self, items: &[T]) -> bool {
        items[self.a] < items[self.b]
    }
}

/// Per-round placements, indexed by the number of slots.
pub struct SortEnv {
    placements: Vec<Option<Placement>>,
}

fn round_seed(seed: u64, slots: usize) -> u64 {
    seed ^ (slots as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

impl SortEnv {
    pub fn new(prior: &Prior, n: usize, seed: u64) -> Result<Self> {
        let placements = (0..=n)
            .map(|m| {
                if m < 2 {
                    return Ok(None);
                }
                Ok(Some(build_placement(&prior.slot_distribution(m)?, round_seed(seed, m))))
            })
            .collect::<Result<_>>()?;
        Ok(SortEnv { placements })
    }

    fn round(&mut self, slots: usize) -> &mut Placement {
        self.placements[slots].as_mut().expect("round placement")
    }
}

#[derive(Clone, Debug)]
pub struct NoisyInsertionSort {
    n: usize,
    k: u32,
    /// Item indices in believed increasing order.
    prefix: Vec<usize>,
    round: Option<Algo2>,
}

impl NoisyInsertionSort {
    pub fn new(n: usize, k: u32) -> Self {
        NoisyInsertionSort { n, k, prefix: Vec::new(), round: None }
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }
}

impl Protocol for NoisyInsertionSort {
    type Env = SortEnv;
    type Question = PairQuestion;
    type Output = Vec<usize>;
    type Key = ();

    fn poll(&mut self, env: &mut SortEnv) -> Result<Poll<PairQuestion, Vec<usize>>> {
        loop {
            let slots = self.prefix.len() + 1;
            let Some(search) = self.round.as_mut() else {
                if self.prefix.len() == self.n {
                    return Ok(Poll::Done(self.prefix.clone()));
                }
                if self.prefix.is_empty() {
                    self.prefix.push(0);
                    continue;
                }
                let placement = env.round(slots);
                let radii = default_radii(placement, self.k);
                self.round = Some(Algo2::new(placement, self.k, radii)?);
                continue;
            };
            let placement = env.round(slots);
            match search.poll(placement)? {
                Poll::Done(slot) => {
                    self.prefix.insert(slot, slots - 1);
                    self.round = None;
                }
                Poll::Ask(q) => {
                    // "slot < b-1?" is "new item < prefix[b-2]?"; the outer boundaries need no comparison
                    let b = q.query.boundary_index;
                    if q.query.is_vacuous(slots) {
                        search.feed(placement, b > 1)?;
                        continue;
                    }
                    return Ok(Poll::Ask(PairQuestion { a: slots - 1, b: self.prefix[b - 2] }));
                }
            }
        }
    }

    fn feed(&mut self, env: &mut SortEnv, yes: bool) -> Result<()> {
        let slots = self.prefix.len() + 1;
        match self.round.as_mut() {
            Some(search) => search.feed(env.round(slots), yes),
            None => Err(Error::Precondition("answer fed without a pending comparison".into())),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SortReport {
    /// Item indices in output order.
    pub order: Vec<usize>,
    pub comparisons: u64,
    pub lies_used: u32,
    pub correct: bool,
}

/// Sorts `items` (distinct) with comparisons answered by `answers`.
pub fn noisy_insertion_sort<T: Ord>(
    items: &[T],
    answers: &mut dyn AnswerSource,
    prior: &Prior,
    k: u32,
    seed: u64,
    max_questions: u64,
) -> Result<SortReport> {
    let n = items.len();
    let mut env = SortEnv::new(prior, n, seed)?;
    let mut proto = NoisyInsertionSort::new(n, k);
    let res = drive(&mut proto, &mut env, |q: &PairQuestion| q.truth(items), answers, max_questions, |_, _, _, _| {})?;
    assert!(res.lies <= k, "comparator told {} lies with budget {k}", res.lies);
    let correct = res.output.windows(2).all(|w| items[w[0]] < items[w[1]]);
    Ok(SortReport { order: res.output, comparisons: res.questions, lies_used: res.lies, correct })
}

/// Ranks of `n` items drawn from `prior` with a generator seeded by `seed`.
pub fn sample_input(prior: &Prior, n: usize, seed: u64) -> Result<Vec<usize>> {
    prior.sample(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{exhaustive_worst_case, scheduled_source, truthful_source};
    use crate::numerics::rational::rational;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn slot_distributions() {
        let u = uniform_prior();
        assert_eq!(u.slot_distribution(1).unwrap().probs(), &[rational(1, 1)]);
        assert_eq!(u.slot_distribution(2).unwrap().probs(), &[rational(1, 2), rational(1, 2)]);
        let m = mallows_prior(rational(1, 2)).unwrap();
        assert_eq!(m.slot_distribution(2).unwrap().probs(), &[rational(1, 3), rational(2, 3)]);
        assert_eq!(
            mallows_prior(rational(1, 1)).unwrap().slot_distribution(5).unwrap(),
            u.slot_distribution(5).unwrap()
        );
        for q in [rational(1, 2), rational(1, 1), rational(2, 1)] {
            let p = mallows_prior(q).unwrap();
            for m in 1..=64 {
                p.slot_distribution(m).unwrap();
            }
        }
        assert!(mallows_prior(rational(0, 1)).is_err());
    }

    #[test]
    fn prior_strings() {
        assert_eq!("uniform".parse::<Prior>().unwrap(), Prior::Uniform);
        assert_eq!("mallows:1/10".parse::<Prior>().unwrap(), Prior::Mallows(rational(1, 10)));
        assert!("mallows".parse::<Prior>().is_err());
        assert!("mallows:-1".parse::<Prior>().is_err());
        assert_eq!(Prior::Mallows(rational(1, 10)).to_string(), "mallows:1/10");
    }

    #[test]
    fn entropies() {
        assert_abs_diff_eq!(permutation_entropy(&uniform_prior(), 4).unwrap(), 24f64.log2(), epsilon = 1e-12);
        let m1 = mallows_prior(rational(1, 1)).unwrap();
        assert_abs_diff_eq!(permutation_entropy(&m1, 4).unwrap(), 24f64.log2(), epsilon = 1e-12);
        let half = mallows_prior(rational(1, 2)).unwrap();
        assert_abs_diff_eq!(permutation_entropy(&half, 3).unwrap(), 2.2971, epsilon = 1e-4);
    }

    #[test]
    fn trivial_sizes() {
        let rep = noisy_insertion_sort::<u32>(&[], &mut truthful_source(), &uniform_prior(), 1, 0, 100).unwrap();
        assert_eq!((rep.comparisons, rep.correct), (0, true));
        let rep = noisy_insertion_sort(&[7], &mut truthful_source(), &uniform_prior(), 1, 0, 100).unwrap();
        assert_eq!((rep.comparisons, rep.order), (0, vec![0]));
    }

    #[test]
    fn truthful_cost_bound() {
        let bound: u64 = (2..=5u64).map(|l| (l as f64).log2().ceil() as u64 + 3 + 2).sum::<u64>() + 10;
        for seed in 0..20 {
            let rep = noisy_insertion_sort(&[5, 4, 3, 2, 1], &mut truthful_source(), &uniform_prior(), 0, seed, 1000).unwrap();
            assert!(rep.correct);
            assert_eq!(rep.order, vec![4, 3, 2, 1, 0]);
            assert!(rep.comparisons <= bound, "{} > {bound}", rep.comparisons);
        }
    }

    #[test]
    fn one_lie_anywhere() {
        for at in 1..=12 {
            let rep = noisy_insertion_sort(&[3, 1, 4, 0, 2], &mut scheduled_source([at], 1).unwrap(), &uniform_prior(), 1, 3, 1000)
                .unwrap();
            assert!(rep.correct, "lie at {at}");
        }
    }

    #[test]
    fn exhaustive_small() {
        for prior in [uniform_prior(), mallows_prior(rational(1, 2)).unwrap()] {
            for n in 3..=4 {
                for items in perms(n) {
                    for k in 0..=1 {
                        let mut env = SortEnv::new(&prior, n, 1).unwrap();
                        let ex = exhaustive_worst_case(
                            NoisyInsertionSort::new(n, k),
                            &mut env,
                            k,
                            |q| q.truth(&items),
                            |_, out: &Vec<usize>| out.windows(2).all(|w| items[w[0]] < items[w[1]]),
                            1_000_000,
                        )
                        .unwrap();
                        assert!(ex.all_valid, "{prior} {items:?} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_inputs_follow_the_prior() {
        let m = mallows_prior(rational(1, 10)).unwrap();
        let identity = (0..1000).filter(|&s| sample_input(&m, 4, s).unwrap() == vec![0, 1, 2, 3]).count();
        // (10/11)(100/111)(1000/1111) ~ 0.74
        assert!((650..830).contains(&identity), "{identity}");
    }

    proptest! {
        #[test]
        fn sorts_random_inputs_with_one_lie(seed in 0u64..1000, at in 1u64..40, n in 2usize..12) {
            let items = sample_input(&uniform_prior(), n, seed).unwrap();
            let rep = noisy_insertion_sort(&items, &mut scheduled_source([at], 1).unwrap(), &uniform_prior(), 1, seed, 10_000).unwrap();
            prop_assert!(rep.correct);
            prop_assert!(rep.lies_used <= 1);
        }
    }
}
