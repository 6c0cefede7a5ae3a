//! Search with a verified prefix pointer: answers are confirmed by the answers that follow
//! them, and a `2k+1` majority vote settles any node that the following answers contradict.

use serde::Serialize;

use crate::adversary::AnswerSource;
use crate::error::{Error, Result};
use crate::numerics::{Radii, RadiusKind};
use crate::placement::{leaf_depth_limit, ComparisonQuery, NodePath, Placement};
use crate::protocol::{drive_search, AskKind, Event, Poll, Protocol, SearchProtocol, SearchQuestion, TranscriptRecord};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Phase {
    Main,
    Majority { asked: u32, yes: u32 },
    Done(usize),
}

/// Opaque explorer key for [`Algo1`] states.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Algo1Key(NodePath, usize, Phase);

#[derive(Clone, Debug)]
struct Audit {
    // leaf path of the hidden element in the finite tree
    truth: NodePath,
    violations: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Algo1 {
    k: u32,
    radii: Radii,
    current: NodePath,
    lv: usize,
    phase: Phase,
    majority_invocations: u32,
    event: Option<Event>,
    audit: Option<Audit>,
}

/// Radii covering every depth a valid run can reach for `mu`.
pub fn default_radii(placement: &Placement, k: u32) -> Radii {
    let deepest = placement.mu().probs().iter().map(leaf_depth_limit).max().unwrap_or(0);
    Radii::new(RadiusKind::Majority, k, deepest as u64 + 2)
}

impl Algo1 {
    pub fn new(env: &mut Placement, k: u32, radii: Radii) -> Result<Self> {
        let mut a = Algo1 {
            k,
            radii,
            current: NodePath::root(),
            lv: 0,
            phase: Phase::Main,
            majority_invocations: 0,
            event: None,
            audit: None,
        };
        a.check_leaf(env)?;
        Ok(a)
    }

    /// Checks after every move of the verified pointer that it stays on the path to `x`.
    pub fn with_audit(mut self, env: &mut Placement, x: usize) -> Result<Self> {
        let (truth, _) = env.finite_leaf(x)?;
        self.audit = Some(Audit { truth, violations: Vec::new() });
        Ok(self)
    }

    pub fn last_verified(&self) -> NodePath {
        self.current.prefix(self.lv)
    }

    pub fn current(&self) -> &NodePath {
        &self.current
    }

    pub fn majority_invocations(&self) -> u32 {
        self.majority_invocations
    }

    pub fn violations(&self) -> &[String] {
        self.audit.as_ref().map_or(&[], |a| &a.violations)
    }

    fn check_leaf(&mut self, env: &mut Placement) -> Result<()> {
        let lv = self.last_verified();
        if let Some(audit) = &mut self.audit {
            if !lv.is_prefix_of(&audit.truth) {
                audit.violations.push(format!("last verified node {lv} left the true path {}", audit.truth));
            }
        }
        if let Some(label) = env.leaf_element(&lv)? {
            self.phase = Phase::Done(label);
        }
        Ok(())
    }

    fn on_main_answer(&mut self, env: &mut Placement, bit: bool) -> Result<()> {
        self.current.push(bit);
        let d = self.lv + 1;
        let r = self.radii.get(d as u64) as usize;
        if self.current.len() != d + r {
            return Ok(());
        }
        let candidate = self.current.bit(d - 1);
        let ones = self.current.count_ones(d, d + r);
        let matches = if candidate { ones } else { r - ones };
        if self.k > 0 && matches < self.k as usize {
            self.phase = Phase::Majority { asked: 0, yes: 0 };
            self.majority_invocations += 1;
        } else {
            self.lv = d;
            self.event = Some(Event::AdvanceLv);
            self.check_leaf(env)?;
        }
        Ok(())
    }
}

impl Protocol for Algo1 {
    type Env = Placement;
    type Question = SearchQuestion;
    type Output = usize;
    type Key = Algo1Key;

    fn poll(&mut self, env: &mut Placement) -> Result<Poll<SearchQuestion, usize>> {
        Ok(match self.phase {
            Phase::Done(label) => Poll::Done(label),
            Phase::Main => Poll::Ask(SearchQuestion { query: env.to_comparison(&self.current)?, kind: AskKind::Main }),
            Phase::Majority { .. } => Poll::Ask(SearchQuestion {
                query: env.to_comparison(&self.last_verified())?,
                kind: AskKind::Majority,
            }),
        })
    }

    fn feed(&mut self, env: &mut Placement, yes: bool) -> Result<()> {
        match self.phase.clone() {
            Phase::Done(_) => Err(Error::Precondition("answer fed to a finished search".into())),
            Phase::Main => self.on_main_answer(env, !yes),
            Phase::Majority { asked, yes: ayes } => {
                let (asked, ayes) = (asked + 1, ayes + yes as u32);
                if asked < 2 * self.k + 1 {
                    self.phase = Phase::Majority { asked, yes: ayes };
                    return Ok(());
                }
                let mut lv = self.last_verified();
                lv.push(ayes <= self.k);
                self.current = lv;
                self.lv += 1;
                self.phase = Phase::Main;
                self.event = Some(Event::MajorityReset);
                self.check_leaf(env)
            }
        }
    }

    fn memo_key(&self) -> Option<Self::Key> {
        // branches only merge where a majority reset pulls the pointers together
        if self.audit.is_some() || self.current.len() != self.lv {
            return None;
        }
        Some(Algo1Key(self.current.clone(), self.lv, self.phase.clone()))
    }
}

impl SearchProtocol for Algo1 {
    fn depth_current(&self) -> usize {
        self.current.len()
    }

    fn depth_last_verified(&self) -> Option<usize> {
        Some(self.lv)
    }

    fn take_event(&mut self) -> Option<Event> {
        self.event.take()
    }
}

/// Asks `query` `2k+1` times and returns the majority answer ("yes" = `true`).
pub fn majority_vote(query: &ComparisonQuery, x: usize, k: u32, answers: &mut dyn AnswerSource) -> bool {
    let yes = (0..2 * k + 1).filter(|_| answers.answer(query.truth(x))).count();
    yes > k as usize
}

/// Number of problematic nodes on the true path of `x`, and the sum of their radii.
///
/// The path is followed past the leaf into the infinite tree, where the search pointer
/// keeps descending while the leaf waits for confirmation.
pub fn count_problematic(env: &mut Placement, x: usize, k: u32, radii: &Radii) -> Result<(u64, u64)> {
    let (_, depth) = env.finite_leaf(x)?;
    let reach = (1..=depth).map(|d| d + radii.get(d as u64) as usize).max().unwrap_or(0);
    let path = env.truthful_path(x, reach)?;
    let mut f = 0;
    let mut f_prime = 0;
    for d in 1..=depth {
        let r = radii.get(d as u64) as usize;
        if is_problematic_segment(path.bit(d - 1), &path, d, d + r, k) {
            f += 1;
            f_prime += r as u64;
        }
    }
    Ok((f, f_prime))
}

/// True when at most `k` of the directions in `path[from..to]` equal `dir`.
pub fn is_problematic_segment(dir: bool, path: &NodePath, from: usize, to: usize, k: u32) -> bool {
    let ones = path.count_ones(from, to);
    let same = if dir { ones } else { to - from - ones };
    same <= k as usize
}

/// `D + r(D) + F(2k+1) + F' + K'(r(D) + 2k + 1)`.
pub fn question_bound(depth: usize, radii: &Radii, f: u64, f_prime: u64, lies: u64, k: u32) -> u64 {
    if depth == 0 {
        return 0;
    }
    let r = radii.get(depth as u64);
    let m = 2 * k as u64 + 1;
    depth as u64 + r + f * m + f_prime + lies * (r + m)
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub output_label: usize,
    pub questions: u64,
    pub lies_told: u32,
    pub leaf_depth: usize,
    pub problematic_count: u64,
    pub problematic_radius_sum: u64,
    pub majority_invocations: u32,
    pub max_depth: usize,
    /// The accounting bound evaluated for this run.
    pub question_bound: u64,
    pub violations: Vec<String>,
    pub transcript: Vec<TranscriptRecord>,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub radius_override: Option<u64>,
    pub max_questions: u64,
    pub record: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { radius_override: None, max_questions: 1_000_000, record: false }
    }
}

/// Runs the search for hidden element `x` (0-based) against `answers`, with auditing.
pub fn run_algo1(
    env: &mut Placement,
    x: usize,
    k: u32,
    answers: &mut dyn AnswerSource,
    opts: &RunOptions,
) -> Result<RunReport> {
    let radii = match opts.radius_override {
        Some(r) => Radii::constant(RadiusKind::Majority, k, r),
        None => default_radii(env, k),
    };
    let nominal = default_radii(env, k);
    let mut algo = Algo1::new(env, k, radii)?.with_audit(env, x)?;
    let run = drive_search(&mut algo, env, x, answers, opts.max_questions, opts.record)?;
    let res = run.result;
    let (_, leaf_depth) = env.finite_leaf(x)?;
    let (f, f_prime) = count_problematic(env, x, k, &nominal)?;
    let bound = question_bound(leaf_depth, &nominal, f, f_prime, res.lies as u64, k);
    let mut violations = algo.violations().to_vec();
    if res.output != x {
        violations.push(format!("output x{} but hidden element is x{}", res.output + 1, x + 1));
    }
    if res.questions > bound {
        violations.push(format!("{} questions exceed the accounting bound {bound}", res.questions));
    }
    Ok(RunReport {
        output_label: res.output,
        questions: res.questions,
        lies_told: res.lies,
        leaf_depth,
        problematic_count: f,
        problematic_radius_sum: f_prime,
        majority_invocations: algo.majority_invocations(),
        max_depth: run.max_depth,
        question_bound: bound,
        violations,
        transcript: run.transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{exhaustive_worst_case, scheduled_source, truthful_source, DEFAULT_FORK_BUDGET};
    use crate::numerics::ProbabilityVector;
    use crate::placement::build_placement;

    fn run(mu: &ProbabilityVector, seed: u64, x: usize, k: u32, source: &mut dyn AnswerSource) -> RunReport {
        let mut env = build_placement(mu, seed);
        run_algo1(&mut env, x, k, source, &RunOptions { record: true, ..RunOptions::default() }).unwrap()
    }

    #[test]
    fn truthful_k0_costs_depth_plus_radius() {
        let mu = ProbabilityVector::uniform(4).unwrap();
        for seed in 0..20 {
            for x in 0..4 {
                let rep = run(&mu, seed, x, 0, &mut truthful_source());
                assert_eq!(rep.output_label, x);
                assert_eq!(rep.majority_invocations, 0);
                let r = radius_at(rep.leaf_depth, 0);
                assert_eq!(rep.questions, (rep.leaf_depth as u64) + r);
                assert!(rep.violations.is_empty(), "{:?}", rep.violations);
                assert!(rep.transcript.iter().all(|t| !t.lie));
            }
        }
    }

    fn radius_at(d: usize, k: u32) -> u64 {
        crate::numerics::radius_r(d.max(1) as u64, k)
    }

    #[test]
    fn single_lie_at_first_question() {
        let mu = ProbabilityVector::uniform(4).unwrap();
        for seed in 0..10 {
            for x in 0..4 {
                let rep = run(&mu, seed, x, 1, &mut scheduled_source([1], 1).unwrap());
                assert_eq!(rep.output_label, x);
                assert_eq!(rep.lies_told, 1);
                assert!(rep.violations.is_empty(), "{:?}", rep.violations);
            }
        }
    }

    #[test]
    fn single_element_asks_nothing() {
        let mu = ProbabilityVector::uniform(1).unwrap();
        let rep = run(&mu, 3, 0, 2, &mut truthful_source());
        assert_eq!((rep.output_label, rep.questions), (0, 0));
    }

    #[test]
    fn majority_examples() {
        let q = ComparisonQuery { boundary_index: 3 };
        // truth for x = 0 is "yes"; answers (no, yes, no) read as bits (1, 0, 1)
        let mut s = scheduled_source([1, 3], 2).unwrap();
        assert!(!majority_vote(&q, 0, 1, &mut s));
        let mut t = truthful_source();
        assert!(majority_vote(&q, 0, 0, &mut t));
        assert_eq!(t.questions_answered(), 1);
        let mut t = truthful_source();
        assert!(majority_vote(&q, 0, 2, &mut t));
        assert_eq!(t.questions_answered(), 5);
    }

    #[test]
    fn problematic_segments() {
        let alt = NodePath::from_bits(&(0..40).map(|i| i % 2 == 0).collect::<Vec<_>>());
        // 20 of the 40 directions match; k >= 20 makes the node problematic, k = 10 does not
        assert!(!is_problematic_segment(true, &alt, 0, 40, 10));
        assert!(is_problematic_segment(true, &alt, 0, 40, 20));
        let mu = ProbabilityVector::uniform(8).unwrap();
        let radii = default_radii(&build_placement(&mu, 0), 1);
        for seed in 0..20 {
            let mut env = build_placement(&mu, seed);
            for x in 0..8 {
                let (f, fp) = count_problematic(&mut env, x, 1, &radii).unwrap();
                // leaves are far shallower than 1 + r(1), and random bits make a hit astronomically unlikely
                assert_eq!((f, fp), (0, 0));
            }
        }
    }

    #[test]
    fn exhaustive_small_sweep() {
        for n in [2usize, 4, 8] {
            let mu = ProbabilityVector::uniform(n).unwrap();
            for k in 0..=2u32 {
                for seed in 0..2 {
                    let mut env = build_placement(&mu, seed);
                    let radii = default_radii(&env, k);
                    for x in 0..n {
                        let algo = Algo1::new(&mut env, k, radii.clone()).unwrap();
                        let ex = exhaustive_worst_case(algo, &mut env, k, |q| q.truth(x), |_, o| *o == x, DEFAULT_FORK_BUDGET)
                            .unwrap();
                        assert!(ex.all_valid, "n={n} k={k} seed={seed} x={x}");
                    }
                }
            }
        }
    }
}
