//! Answer sources that lie at most `k` times, and the exhaustive worst-case explorer.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{binom, binom_leq, Rational};
use crate::protocol::{Poll, Protocol};

pub const DEFAULT_FORK_BUDGET: u64 = 10_000_000;

/// Emits one answer per question; questions are numbered from 1 across the whole run.
pub trait AnswerSource {
    /// Answer to the next question, given its truthful answer.
    fn answer(&mut self, truth: bool) -> bool;
    fn lies_used(&self) -> u32;
    fn questions_answered(&self) -> u64;
}

#[derive(Clone, Debug, Default)]
pub struct Truthful {
    asked: u64,
}

pub fn truthful_source() -> Truthful {
    Truthful::default()
}

impl AnswerSource for Truthful {
    fn answer(&mut self, truth: bool) -> bool {
        self.asked += 1;
        truth
    }

    fn lies_used(&self) -> u32 {
        0
    }

    fn questions_answered(&self) -> u64 {
        self.asked
    }
}

/// Lies exactly at the listed 1-based question indices.
#[derive(Clone, Debug)]
pub struct Scheduled {
    schedule: BTreeSet<u64>,
    budget: u32,
    asked: u64,
    lies: u32,
}

pub fn scheduled_source(schedule: impl IntoIterator<Item = u64>, k: u32) -> Result<Scheduled> {
    let schedule: BTreeSet<u64> = schedule.into_iter().collect();
    if schedule.len() > k as usize {
        return Err(Error::Config(format!("{} scheduled lies exceed budget {k}", schedule.len())));
    }
    if schedule.contains(&0) {
        return Err(Error::Config("question indices start at 1".into()));
    }
    Ok(Scheduled { schedule, budget: k, asked: 0, lies: 0 })
}

impl Scheduled {
    pub fn schedule(&self) -> &BTreeSet<u64> {
        &self.schedule
    }
}

impl AnswerSource for Scheduled {
    fn answer(&mut self, truth: bool) -> bool {
        self.asked += 1;
        if self.schedule.contains(&self.asked) {
            self.lies += 1;
            assert!(self.lies <= self.budget, "scheduled source exceeded its lie budget");
            !truth
        } else {
            truth
        }
    }

    fn lies_used(&self) -> u32 {
        self.lies
    }

    fn questions_answered(&self) -> u64 {
        self.asked
    }
}

/// `ceil(log2(1/mu) / 2)`: the smallest `a` with `mu 4^a >= 1`.
pub fn alpha(mu_x: &Rational) -> u32 {
    let mut a = 0;
    let mut v = mu_x.clone();
    let four = Rational::from_integer(BigInt::from(4));
    while v < Rational::one() {
        v *= &four;
        a += 1;
    }
    a
}

/// A subset of `{1..alpha}` of size at most `k`, uniform over all such subsets.
pub fn random_alpha_schedule(alpha: u32, k: u32, rng: &mut impl Rng) -> BTreeSet<u64> {
    let total = binom_leq(alpha as u64, k as u64);
    // pick the size with probability C(alpha, s) / total
    let mut ticket = rng.random_range(0..total.to_u64().expect("subset count fits u64"));
    let mut size = 0;
    for s in 0..=k.min(alpha) {
        let c = binom(alpha as u64, s as u64).to_u64().unwrap();
        if ticket < c {
            size = s;
            break;
        }
        ticket -= c;
    }
    sample(rng, alpha as usize, size as usize).into_iter().map(|i| i as u64 + 1).collect()
}

pub fn random_alpha_source(mu_x: &Rational, k: u32, seed: u64) -> Scheduled {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schedule = random_alpha_schedule(alpha(mu_x), k, &mut rng);
    scheduled_source(schedule, k).expect("schedule within budget")
}

/// Adversary selector as written on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdversarySpec {
    Truthful,
    Schedule(Vec<u64>),
    RandomAlpha { seed: u64 },
    Exhaustive,
}

impl fmt::Display for AdversarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversarySpec::Truthful => write!(f, "truthful"),
            AdversarySpec::Exhaustive => write!(f, "exhaustive"),
            AdversarySpec::RandomAlpha { seed } => write!(f, "random-alpha:seed={seed}"),
            AdversarySpec::Schedule(s) => {
                let list: Vec<String> = s.iter().map(u64::to_string).collect();
                write!(f, "schedule:{}", list.join(","))
            }
        }
    }
}

impl FromStr for AdversarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad adversary spec {s:?}"));
        match s.split_once(':') {
            None if s == "truthful" => Ok(AdversarySpec::Truthful),
            None if s == "exhaustive" => Ok(AdversarySpec::Exhaustive),
            None if s == "random-alpha" => Ok(AdversarySpec::RandomAlpha { seed: 0 }),
            Some(("schedule", list)) => {
                let list = list.trim();
                if list.is_empty() {
                    return Ok(AdversarySpec::Schedule(Vec::new()));
                }
                list.split(',')
                    .map(|x| x.trim().parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()
                    .map(AdversarySpec::Schedule)
            }
            Some(("random-alpha", rest)) => {
                let seed = rest.trim().strip_prefix("seed=").ok_or_else(bad)?;
                Ok(AdversarySpec::RandomAlpha { seed: seed.parse().map_err(|_| bad())? })
            }
            _ => Err(bad()),
        }
    }
}

/// Result of exploring every answer sequence with at most `k` lies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exploration {
    /// Longest run over all branches.
    pub max_questions: u64,
    /// `by_lies[j]`: longest run among branches with exactly `j` lies, if any ends that way.
    pub by_lies: Vec<Option<u64>>,
    pub all_valid: bool,
    /// Simulated questions, counting each merged state once.
    pub steps: u64,
}

#[derive(Clone)]
struct Outcome {
    // longest remaining run using exactly j further lies
    rem: Vec<Option<u64>>,
    valid: bool,
}

impl Outcome {
    fn step(truthful: &Outcome, lie: Option<&Outcome>) -> Outcome {
        let mut rem: Vec<Option<u64>> = truthful.rem.iter().map(|r| r.map(|v| v + 1)).collect();
        let mut valid = truthful.valid;
        if let Some(lie) = lie {
            valid &= lie.valid;
            for (j, r) in lie.rem.iter().enumerate() {
                if let Some(v) = r {
                    let slot = &mut rem[j + 1];
                    *slot = Some(slot.map_or(v + 1, |cur| cur.max(v + 1)));
                }
            }
        }
        Outcome { rem, valid }
    }
}

struct Explorer<'a, P: Protocol, T, V> {
    env: &'a mut P::Env,
    k: u32,
    truth: T,
    valid: V,
    budget: u64,
    steps: u64,
    memo: HashMap<(P::Key, u32), Outcome>,
}

impl<P, T, V> Explorer<'_, P, T, V>
where
    P: Protocol,
    T: Fn(&P::Question) -> bool,
    V: Fn(&P, &P::Output) -> bool,
{
    fn run(&mut self, mut state: P, lies: u32) -> Result<Outcome> {
        let width = (self.k - lies) as usize + 1;
        // (memo key, outcome of the lie branch) for each question on the truthful spine
        let mut spine: Vec<(Option<(P::Key, u32)>, Option<Outcome>)> = Vec::new();
        let mut tail = loop {
            let key = state.memo_key().map(|key| (key, lies));
            if let Some(hit) = key.as_ref().and_then(|key| self.memo.get(key)) {
                break hit.clone();
            }
            let question = match state.poll(self.env)? {
                Poll::Done(out) => {
                    let mut rem = vec![None; width];
                    rem[0] = Some(0);
                    break Outcome { rem, valid: (self.valid)(&state, &out) };
                }
                Poll::Ask(q) => q,
            };
            self.steps += 1;
            if self.steps > self.budget {
                return Err(Error::ForkBudget(self.budget));
            }
            let honest = (self.truth)(&question);
            let lie_branch = if lies < self.k {
                let mut fork = state.clone();
                fork.feed(self.env, !honest)?;
                Some(self.run(fork, lies + 1)?)
            } else {
                None
            };
            state.feed(self.env, honest)?;
            spine.push((key, lie_branch));
        };
        while let Some((key, lie_branch)) = spine.pop() {
            tail = Outcome::step(&tail, lie_branch.as_ref());
            if let Some(key) = key {
                self.memo.insert(key, tail.clone());
            }
        }
        Ok(tail)
    }
}

/// Forks `proto` at every question into a truthful and (while budget remains) a lying
/// branch, and reports the worst case over all resulting runs. `valid` sees the final
/// state along with the output.
pub fn exhaustive_worst_case<P: Protocol>(
    proto: P,
    env: &mut P::Env,
    k: u32,
    truth: impl Fn(&P::Question) -> bool,
    valid: impl Fn(&P, &P::Output) -> bool,
    budget: u64,
) -> Result<Exploration> {
    let mut explorer = Explorer::<P, _, _> { env, k, truth, valid, budget, steps: 0, memo: HashMap::new() };
    let outcome = explorer.run(proto, 0)?;
    Ok(Exploration {
        max_questions: outcome.rem.iter().flatten().copied().max().unwrap_or(0),
        by_lies: outcome.rem,
        all_valid: outcome.valid,
        steps: explorer.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rational;

    #[test]
    fn scheduled_examples() {
        let mut s = scheduled_source([1], 1).unwrap();
        assert!(!s.answer(true));
        assert!(s.answer(true));
        assert_eq!(s.lies_used(), 1);
        let mut empty = scheduled_source([], 2).unwrap();
        assert!((0..10).all(|_| empty.answer(true)));
        assert_eq!(empty.lies_used(), 0);
        assert!(scheduled_source([1, 2], 1).is_err());
        let mut far = scheduled_source([1000], 1).unwrap();
        for _ in 0..10 {
            far.answer(false);
        }
        assert_eq!(far.lies_used(), 0);
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(&rational(1, 2)), 1);
        assert_eq!(alpha(&rational(1, 256)), 4);
        assert_eq!(alpha(&rational(1, 257)), 5);
        assert_eq!(alpha(&rational(1, 1)), 0);
        assert_eq!(alpha(&rational(1, 4)), 1);
    }

    #[test]
    fn random_alpha_small_cases() {
        for seed in 0..50 {
            let s = random_alpha_source(&rational(1, 2), 1, seed);
            assert!(s.schedule().iter().all(|&t| t == 1));
            assert!(random_alpha_source(&rational(1, 256), 0, seed).schedule().is_empty());
        }
    }

    #[test]
    fn random_alpha_is_uniform_over_subsets() {
        // alpha = 4, k = 2: 1 + 4 + 6 = 11 subsets
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws = 100_000u64;
        let mut freq: HashMap<Vec<u64>, u64> = HashMap::new();
        for _ in 0..draws {
            let s = random_alpha_schedule(4, 2, &mut rng);
            assert!(s.len() <= 2 && s.iter().all(|&t| (1..=4).contains(&t)));
            *freq.entry(s.into_iter().collect()).or_default() += 1;
        }
        assert_eq!(freq.len(), 11);
        let expected = draws as f64 / 11.0;
        let sigma = (expected * (1.0 - 1.0 / 11.0)).sqrt();
        let mut chi2 = 0.0;
        for &f in freq.values() {
            assert!((f as f64 - expected).abs() <= 3.0 * sigma, "f={f}");
            chi2 += (f as f64 - expected).powi(2) / expected;
        }
        // 10 degrees of freedom; 0.999 quantile is about 29.6
        assert!(chi2 < 29.6, "chi2={chi2}");
    }

    #[test]
    fn spec_strings() {
        assert_eq!("truthful".parse::<AdversarySpec>().unwrap(), AdversarySpec::Truthful);
        assert_eq!("schedule:1,5,9".parse::<AdversarySpec>().unwrap(), AdversarySpec::Schedule(vec![1, 5, 9]));
        assert_eq!(
            "random-alpha:seed=7".parse::<AdversarySpec>().unwrap(),
            AdversarySpec::RandomAlpha { seed: 7 }
        );
        assert_eq!("exhaustive".parse::<AdversarySpec>().unwrap(), AdversarySpec::Exhaustive);
        assert!("schedule:x".parse::<AdversarySpec>().is_err());
        assert!("liar".parse::<AdversarySpec>().is_err());
    }

    /// Asks "bit i?" for a fixed number of rounds and outputs the majority of each triple.
    #[derive(Clone)]
    struct Repeat {
        asked: u32,
        yes: u32,
        rounds: u32,
    }

    impl Protocol for Repeat {
        type Env = ();
        type Question = ();
        type Output = bool;
        type Key = (u32, u32);

        fn poll(&mut self, _: &mut ()) -> Result<Poll<(), bool>> {
            Ok(if self.asked == self.rounds { Poll::Done(2 * self.yes > self.rounds) } else { Poll::Ask(()) })
        }

        fn feed(&mut self, _: &mut (), yes: bool) -> Result<()> {
            self.asked += 1;
            self.yes += yes as u32;
            Ok(())
        }

        fn memo_key(&self) -> Option<(u32, u32)> {
            Some((self.asked, self.yes))
        }
    }

    #[test]
    fn explorer_counts_majority_vote() {
        let proto = Repeat { asked: 0, yes: 0, rounds: 3 };
        let one = exhaustive_worst_case(proto.clone(), &mut (), 1, |_| true, |_, o| *o, 100).unwrap();
        assert!(one.all_valid);
        assert_eq!(one.max_questions, 3);
        assert_eq!(one.by_lies, vec![Some(3), Some(3)]);
        let two = exhaustive_worst_case(proto.clone(), &mut (), 2, |_| true, |_, o| *o, 100).unwrap();
        assert!(!two.all_valid);
        let zero = exhaustive_worst_case(proto, &mut (), 0, |_| true, |_, o| *o, 100).unwrap();
        assert_eq!(zero.by_lies, vec![Some(3)]);
        let tight = exhaustive_worst_case(Repeat { asked: 0, yes: 0, rounds: 50 }, &mut (), 2, |_| true, |_, o| *o, 10);
        assert_eq!(tight.unwrap_err(), Error::ForkBudget(10));
    }
}
