//! Experiment drivers behind the command line: trial loops, summaries and output formats.
//!
//! Trial `t` of a run with base seed `s` uses `s ^ t` for everything it draws. Rows come
//! back in trial order whatever the worker count, so outputs are byte-for-byte reproducible.

use std::fmt::Write as _;
use std::io;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{
    exhaustive_worst_case, random_alpha_source, scheduled_source, truthful_source, AdversarySpec, AnswerSource,
    DEFAULT_FORK_BUDGET,
};
use crate::algo1::{self, run_algo1, Algo1, RunOptions};
use crate::algo2::{self, run_algo2, Algo2};
use crate::error::{Error, Result};
use crate::numerics::{bounds_report, BoundsReport, ProbabilityVector, Radii, RadiusKind};
use crate::oracle::{optimal_worst_case, packing_threshold};
use crate::placement::{build_placement, Placement};
use crate::sorting::{noisy_insertion_sort, permutation_entropy, sample_input, NoisyInsertionSort, Prior, SortEnv};

pub const SEED_RULE: &str = "trial seed = base seed XOR trial index";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Algo {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Algo::One),
            "2" => Ok(Algo::Two),
            _ => Err(Error::Config(format!("unknown algorithm {s:?}, expected 1 or 2"))),
        }
    }
}

/// splitmix64 finalizer, to give each consumer of a trial seed its own stream.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const SALT_ELEMENT: u64 = 1;
const SALT_ADVERSARY: u64 = 2;

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    /// Mean, sample standard deviation and range; all zero for no samples.
    pub fn of(xs: impl IntoIterator<Item = f64>) -> Stats {
        let xs: Vec<f64> = xs.into_iter().collect();
        if xs.is_empty() {
            return Stats::default();
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Stats {
            mean,
            std: var.sqrt(),
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

fn make_source(spec: &AdversarySpec, mu_x: &crate::numerics::Rational, k: u32, trial_seed: u64) -> Result<Box<dyn AnswerSource>> {
    Ok(match spec {
        AdversarySpec::Truthful => Box::new(truthful_source()),
        AdversarySpec::Schedule(s) => Box::new(scheduled_source(s.iter().copied(), k)?),
        AdversarySpec::RandomAlpha { seed } => {
            Box::new(random_alpha_source(mu_x, k, derive_seed(trial_seed ^ seed, SALT_ADVERSARY)))
        }
        AdversarySpec::Exhaustive => unreachable!("exhaustive runs are explored, not driven"),
    })
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub mu: ProbabilityVector,
    /// Prior used for the placement when it differs from the true distribution.
    pub eta: Option<ProbabilityVector>,
    pub k: u32,
    pub algo: Algo,
    pub adversary: AdversarySpec,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub radius_override: Option<u64>,
    pub max_questions: u64,
    pub fork_budget: u64,
}

impl SearchConfig {
    pub fn new(mu: ProbabilityVector, k: u32, algo: Algo) -> Self {
        SearchConfig {
            mu,
            eta: None,
            k,
            algo,
            adversary: AdversarySpec::Truthful,
            trials: 1,
            seed: 0,
            workers: 1,
            radius_override: None,
            max_questions: RunOptions::default().max_questions,
            fork_budget: DEFAULT_FORK_BUDGET,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(eta) = &self.eta {
            if eta.labels() != self.mu.labels() {
                return Err(Error::Config("prior must have the same labels as the distribution".into()));
            }
        }
        if let AdversarySpec::Schedule(s) = &self.adversary {
            scheduled_source(s.iter().copied(), self.k)?;
        }
        Ok(())
    }
}

/// Columns that do not apply (exhaustive worst cases, or the first algorithm's verification
/// counters) are left empty.
#[derive(Clone, Debug, Serialize)]
pub struct SearchRow {
    pub trial: u64,
    pub element: usize,
    pub questions: u64,
    pub lies: u32,
    pub output_correct: bool,
    pub max_depth: Option<usize>,
    pub jump_backs: Option<u32>,
    pub v: Option<u32>,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchSummary {
    pub algo: Algo,
    pub k: u32,
    pub adversary: String,
    pub trials: u64,
    pub seed: u64,
    pub seed_rule: &'static str,
    pub questions: Stats,
    pub mean_lies: f64,
    pub correct: u64,
    pub violations: u64,
    pub bounds: BoundsReport,
}

pub struct SearchOutcome {
    pub rows: Vec<SearchRow>,
    pub summary: SearchSummary,
}

impl SearchOutcome {
    pub fn ok(&self) -> bool {
        self.summary.correct == self.summary.trials && self.summary.violations == 0
    }
}

fn search_trial(cfg: &SearchConfig, trial: u64) -> Result<SearchRow> {
    let ts = cfg.seed ^ trial;
    let x = cfg.mu.sample_index(ChaCha8Rng::seed_from_u64(derive_seed(ts, SALT_ELEMENT)).random::<f64>());
    let mut env = build_placement(cfg.eta.as_ref().unwrap_or(&cfg.mu), ts);
    let opts = RunOptions { radius_override: cfg.radius_override, max_questions: cfg.max_questions, record: false };
    if cfg.adversary == AdversarySpec::Exhaustive {
        let (ex, _) = explore(&mut env, cfg.algo, x, cfg.k, cfg.radius_override, cfg.fork_budget)?;
        let lies = ex.by_lies.iter().rposition(|q| *q == Some(ex.max_questions)).unwrap_or(0) as u32;
        return Ok(SearchRow {
            trial,
            element: x,
            questions: ex.max_questions,
            lies,
            output_correct: ex.all_valid,
            max_depth: None,
            jump_backs: None,
            v: None,
            violations: if ex.all_valid { Vec::new() } else { vec!["some answer sequence fails".into()] },
        });
    }
    let mut source = make_source(&cfg.adversary, cfg.mu.prob(x), cfg.k, ts)?;
    Ok(match cfg.algo {
        Algo::One => {
            let rep = run_algo1(&mut env, x, cfg.k, source.as_mut(), &opts)?;
            SearchRow {
                trial,
                element: x,
                questions: rep.questions,
                lies: rep.lies_told,
                output_correct: rep.output_label == x,
                max_depth: Some(rep.max_depth),
                jump_backs: None,
                v: None,
                violations: rep.violations,
            }
        }
        Algo::Two => {
            let rep = run_algo2(&mut env, x, cfg.k, source.as_mut(), &opts)?;
            SearchRow {
                trial,
                element: x,
                questions: rep.questions,
                lies: rep.lies_told,
                output_correct: rep.output_label == x,
                max_depth: Some(rep.max_depth),
                jump_backs: Some(rep.jump_backs),
                v: Some(rep.verification_pairs),
                violations: rep.violations,
            }
        }
    })
}

pub fn run_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let rows: Vec<SearchRow> =
        pool(cfg.workers)?.install(|| (0..cfg.trials).into_par_iter().map(|t| search_trial(cfg, t)).collect::<Result<_>>())?;
    let summary = SearchSummary {
        algo: cfg.algo,
        k: cfg.k,
        adversary: cfg.adversary.to_string(),
        trials: cfg.trials,
        seed: cfg.seed,
        seed_rule: SEED_RULE,
        questions: Stats::of(rows.iter().map(|r| r.questions as f64)),
        mean_lies: Stats::of(rows.iter().map(|r| r.lies as f64)).mean,
        correct: rows.iter().filter(|r| r.output_correct).count() as u64,
        violations: rows.iter().map(|r| r.violations.len() as u64).sum(),
        bounds: bounds_report(&cfg.mu, cfg.k, cfg.eta.as_ref())?,
    };
    Ok(SearchOutcome { rows, summary })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub const SEARCH_COLUMNS: &str = "trial,questions,lies,output_correct,max_depth,jump_backs,V";
pub const SORT_COLUMNS: &str = "trial,comparisons,lies_used,correct";

pub fn search_csv(rows: &[SearchRow]) -> String {
    let mut out = format!("{SEARCH_COLUMNS}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.trial,
            r.questions,
            r.lies,
            r.output_correct,
            opt(r.max_depth),
            opt(r.jump_backs),
            opt(r.v)
        );
    }
    out
}

/// Explores every answer sequence with at most `k` lies for hidden `x`, auditing each run.
/// Also returns the radii the search used.
pub fn explore(
    env: &mut Placement,
    algo: Algo,
    x: usize,
    k: u32,
    radius_override: Option<u64>,
    budget: u64,
) -> Result<(crate::adversary::Exploration, Radii)> {
    match algo {
        Algo::One => {
            let radii = match radius_override {
                Some(r) => Radii::constant(RadiusKind::Majority, k, r),
                None => algo1::default_radii(env, k),
            };
            let a = Algo1::new(env, k, radii.clone())?.with_audit(env, x)?;
            let ex = exhaustive_worst_case(a, env, k, |q| q.truth(x), |a, o| *o == x && a.violations().is_empty(), budget)?;
            Ok((ex, radii))
        }
        Algo::Two => {
            let radii = match radius_override {
                Some(r) => Radii::constant(RadiusKind::Stack, k, r),
                None => algo2::default_radii(env, k),
            };
            let a = Algo2::new(env, k, radii.clone())?.with_audit(env, x)?;
            let ex = exhaustive_worst_case(a, env, k, |q| q.truth(x), |a, o| *o == x && a.violations().is_empty(), budget)?;
            Ok((ex, radii))
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub mu: ProbabilityVector,
    pub k: u32,
    pub algo: Algo,
    /// Number of placements (`seed ^ s` for `s < seeds`).
    pub seeds: u64,
    pub seed: u64,
    pub workers: usize,
    pub radius_override: Option<u64>,
    pub fork_budget: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyFailure {
    pub trial: u64,
    pub element: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub algo: Algo,
    pub k: u32,
    pub seeds: u64,
    pub seed: u64,
    pub seed_rule: &'static str,
    pub radius_override: Option<u64>,
    pub runs: u64,
    pub valid_runs: u64,
    pub failures: Vec<VerifyFailure>,
    /// Longest run over every placement, element and answer sequence.
    pub max_questions: u64,
    /// Per placement, the mu-weighted worst case over answer sequences; then averaged.
    pub mean_expected_worst_case: f64,
    pub steps: u64,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let per_seed = pool(cfg.workers)?.install(|| {
        (0..cfg.seeds)
            .into_par_iter()
            .map(|s| {
                let mut env = build_placement(&cfg.mu, cfg.seed ^ s);
                let mut out = Vec::with_capacity(cfg.mu.len());
                for x in 0..cfg.mu.len() {
                    let (ex, _) = explore(&mut env, cfg.algo, x, cfg.k, cfg.radius_override, cfg.fork_budget)?;
                    out.push(ex);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let probs = cfg.mu.probs_f64();
    let mut failures = Vec::new();
    let mut expected = Vec::new();
    for (s, exs) in per_seed.iter().enumerate() {
        expected.push(exs.iter().zip(&probs).map(|(ex, p)| p * ex.max_questions as f64).sum::<f64>());
        for (x, ex) in exs.iter().enumerate() {
            if !ex.all_valid {
                failures.push(VerifyFailure { trial: s as u64, element: x });
            }
        }
    }
    let all = per_seed.iter().flatten();
    let runs = cfg.seeds * cfg.mu.len() as u64;
    Ok(VerifyReport {
        algo: cfg.algo,
        k: cfg.k,
        seeds: cfg.seeds,
        seed: cfg.seed,
        seed_rule: SEED_RULE,
        radius_override: cfg.radius_override,
        runs,
        valid_runs: runs - failures.len() as u64,
        failures,
        max_questions: all.clone().map(|e| e.max_questions).max().unwrap_or(0),
        mean_expected_worst_case: Stats::of(expected).mean,
        steps: all.map(|e| e.steps).sum(),
    })
}

#[derive(Clone, Debug)]
pub struct SortConfig {
    pub n: usize,
    pub k: u32,
    pub prior: Prior,
    /// Distribution of the inputs; defaults to `prior`.
    pub input_prior: Option<Prior>,
    pub adversary: AdversarySpec,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub max_questions: u64,
    pub fork_budget: u64,
}

impl SortConfig {
    pub fn new(n: usize, k: u32, prior: Prior) -> Self {
        SortConfig {
            n,
            k,
            prior,
            input_prior: None,
            adversary: AdversarySpec::Truthful,
            trials: 1,
            seed: 0,
            workers: 1,
            max_questions: RunOptions::default().max_questions,
            fork_budget: DEFAULT_FORK_BUDGET,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SortRow {
    pub trial: u64,
    pub comparisons: u64,
    pub lies_used: u32,
    pub correct: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SortSummary {
    pub n: usize,
    pub k: u32,
    pub prior: String,
    pub input_prior: String,
    pub adversary: String,
    pub trials: u64,
    pub seed: u64,
    pub seed_rule: &'static str,
    pub comparisons: Stats,
    pub mean_lies: f64,
    pub correct: u64,
    pub permutation_entropy: f64,
    pub log2_n_factorial: f64,
}

pub struct SortOutcome {
    pub rows: Vec<SortRow>,
    pub summary: SortSummary,
}

impl SortOutcome {
    pub fn ok(&self) -> bool {
        self.summary.correct == self.summary.trials
    }
}

fn sort_trial(cfg: &SortConfig, trial: u64) -> Result<SortRow> {
    let ts = cfg.seed ^ trial;
    let items = sample_input(cfg.input_prior.as_ref().unwrap_or(&cfg.prior), cfg.n, derive_seed(ts, SALT_ELEMENT))?;
    if cfg.adversary == AdversarySpec::Exhaustive {
        let mut env = SortEnv::new(&cfg.prior, cfg.n, ts)?;
        let ex = exhaustive_worst_case(
            NoisyInsertionSort::new(cfg.n, cfg.k),
            &mut env,
            cfg.k,
            |q| q.truth(&items),
            |_, out: &Vec<usize>| out.windows(2).all(|w| items[w[0]] < items[w[1]]),
            cfg.fork_budget,
        )?;
        let lies = ex.by_lies.iter().rposition(|q| *q == Some(ex.max_questions)).unwrap_or(0) as u32;
        return Ok(SortRow { trial, comparisons: ex.max_questions, lies_used: lies, correct: ex.all_valid });
    }
    let mut source: Box<dyn AnswerSource> = match &cfg.adversary {
        AdversarySpec::Truthful => Box::new(truthful_source()),
        AdversarySpec::Schedule(s) => Box::new(scheduled_source(s.iter().copied(), cfg.k)?),
        _ => return Err(Error::Config("sorting supports truthful, schedule and exhaustive adversaries".into())),
    };
    let rep = noisy_insertion_sort(&items, source.as_mut(), &cfg.prior, cfg.k, ts, cfg.max_questions)?;
    Ok(SortRow { trial, comparisons: rep.comparisons, lies_used: rep.lies_used, correct: rep.correct })
}

pub fn run_sort(cfg: &SortConfig) -> Result<SortOutcome> {
    let rows: Vec<SortRow> =
        pool(cfg.workers)?.install(|| (0..cfg.trials).into_par_iter().map(|t| sort_trial(cfg, t)).collect::<Result<_>>())?;
    let log2_fact = (2..=cfg.n).map(|i| (i as f64).log2()).sum();
    let summary = SortSummary {
        n: cfg.n,
        k: cfg.k,
        prior: cfg.prior.to_string(),
        input_prior: cfg.input_prior.as_ref().unwrap_or(&cfg.prior).to_string(),
        adversary: cfg.adversary.to_string(),
        trials: cfg.trials,
        seed: cfg.seed,
        seed_rule: SEED_RULE,
        comparisons: Stats::of(rows.iter().map(|r| r.comparisons as f64)),
        mean_lies: Stats::of(rows.iter().map(|r| r.lies_used as f64)).mean,
        correct: rows.iter().filter(|r| r.correct).count() as u64,
        permutation_entropy: permutation_entropy(&cfg.prior, cfg.n)?,
        log2_n_factorial: log2_fact,
    };
    Ok(SortOutcome { rows, summary })
}

pub fn sort_csv(rows: &[SortRow]) -> String {
    let mut out = format!("{SORT_COLUMNS}\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.trial, r.comparisons, r.lies_used, r.correct);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub k: u32,
    pub optimum: u32,
    pub packing_threshold: u32,
}

pub fn run_oracle(n: usize, k: u32) -> Result<OracleReport> {
    Ok(OracleReport { n, k, optimum: optimal_worst_case(n, k)?, packing_threshold: packing_threshold(n, k) })
}

/// JSON with every float written to 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    value.serialize(&mut ser).expect("serializable report");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8 json")
}

/// `name,value` lines for the bound calculators.
pub fn bounds_csv(r: &BoundsReport) -> String {
    let c = &r.constants;
    let mut rows: Vec<(&str, String)> = vec![
        ("k", r.k.to_string()),
        ("entropy", format!("{:.16e}", r.entropy)),
        ("h2", format!("{:.16e}", r.h2)),
        ("h3", format!("{:.16e}", r.h3)),
        ("lower_bound", format!("{:.16e}", r.lower_bound)),
        ("lower_bound_raw", opt(r.lower_bound_raw.map(|v| format!("{v:.16e}")))),
        ("ub_algo1", format!("{:.16e}", r.ub_algo1)),
        ("ub_algo2", format!("{:.16e}", r.ub_algo2)),
        ("kl_divergence", opt(r.kl_divergence.map(|v| format!("{v:.16e}")))),
    ];
    rows.extend([
        ("olog_c", format!("{:.16e}", c.olog_c)),
        ("depth_c_prime", format!("{:.16e}", c.depth_c_prime)),
        ("series_terms", c.series_terms.to_string()),
        ("algo1_series", format!("{:.16e}", c.algo1_series)),
        ("algo2_series", format!("{:.16e}", c.algo2_series)),
    ]);
    let mut out = String::from("name,value\n");
    for (name, value) in rows {
        let _ = writeln!(out, "{name},{value}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize) -> ProbabilityVector {
        ProbabilityVector::uniform(n).unwrap()
    }

    #[test]
    fn empty_run_is_header_only() {
        let mut cfg = SearchConfig::new(uniform(4), 1, Algo::Two);
        cfg.trials = 0;
        let out = run_search(&cfg).unwrap();
        assert_eq!(search_csv(&out.rows), format!("{SEARCH_COLUMNS}\n"));
        assert_eq!(out.summary.questions.mean, 0.0);
    }

    #[test]
    fn deterministic_across_workers() {
        let mut cfg = SearchConfig::new(ProbabilityVector::dyadic(6).unwrap(), 1, Algo::Two);
        cfg.trials = 40;
        cfg.seed = 17;
        cfg.adversary = "random-alpha:seed=3".parse().unwrap();
        let a = run_search(&cfg).unwrap();
        cfg.workers = 4;
        let b = run_search(&cfg).unwrap();
        assert_eq!(search_csv(&a.rows), search_csv(&b.rows));
        assert_eq!(to_json(&a.summary), to_json(&b.summary));
        assert!(a.ok());
    }

    #[test]
    fn algo1_rows_leave_verification_columns_empty() {
        let mut cfg = SearchConfig::new(uniform(4), 0, Algo::One);
        cfg.trials = 2;
        let csv = search_csv(&run_search(&cfg).unwrap().rows);
        assert!(csv.lines().nth(1).unwrap().ends_with(",,"));
    }

    #[test]
    fn exhaustive_search_rows() {
        let mut cfg = SearchConfig::new(uniform(4), 1, Algo::Two);
        cfg.trials = 3;
        cfg.adversary = AdversarySpec::Exhaustive;
        let out = run_search(&cfg).unwrap();
        assert!(out.ok());
        assert!(out.rows.iter().all(|r| r.max_depth.is_none()));
    }

    #[test]
    fn verify_sweeps() {
        let cfg = VerifyConfig {
            mu: uniform(4),
            k: 1,
            algo: Algo::Two,
            seeds: 5,
            seed: 0,
            workers: 2,
            radius_override: None,
            fork_budget: DEFAULT_FORK_BUDGET,
        };
        let rep = run_verify(&cfg).unwrap();
        assert!(rep.ok());
        assert_eq!((rep.runs, rep.valid_runs), (20, 20));
        let zero = run_verify(&VerifyConfig { algo: Algo::One, k: 0, ..cfg.clone() }).unwrap();
        assert!(zero.ok());
        // without lies there is a single branch per element
        assert!(zero.steps <= zero.max_questions * zero.runs);
        let broken = run_verify(&VerifyConfig { radius_override: Some(1), k: 2, mu: uniform(8), ..cfg }).unwrap();
        assert!(!broken.ok());
    }

    #[test]
    fn sort_rows() {
        let mut cfg = SortConfig::new(6, 1, "mallows:1/2".parse().unwrap());
        cfg.trials = 5;
        cfg.adversary = AdversarySpec::Schedule(vec![3]);
        let out = run_sort(&cfg).unwrap();
        assert!(out.ok());
        assert!(sort_csv(&out.rows).starts_with(SORT_COLUMNS));
        cfg.adversary = AdversarySpec::RandomAlpha { seed: 0 };
        assert!(matches!(run_sort(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json(&Stats::of([1.0, 2.0]));
        assert!(s.contains("\"mean\":1.5000000000000000e0"), "{s}");
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["max"], 2.0);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(5, SALT_ELEMENT), derive_seed(5, SALT_ADVERSARY));
        assert_ne!(derive_seed(5, SALT_ELEMENT), 5);
    }
}
