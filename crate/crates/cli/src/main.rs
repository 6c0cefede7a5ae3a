use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liarsearch::adversary::{AdversarySpec, DEFAULT_FORK_BUDGET};
use liarsearch::harness::{
    bounds_csv, run_oracle, run_search, run_sort, run_verify, search_csv, sort_csv, to_json, Algo, SearchConfig,
    SortConfig, VerifyConfig,
};
use liarsearch::numerics::{bounds_report, ProbabilityVector};
use liarsearch::sorting::Prior;
use liarsearch::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_GUARD: u8 = 3;

#[derive(Parser)]
#[command(name = "liarsearch", version, about = "Distributional search and sorting against a lying responder")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy quantities, lower bound and algorithm cost ceilings for a distribution
    Bounds {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(short, long, default_value_t = 0)]
        k: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run search trials against an adversary
    Search {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value = "2")]
        algo: Algo,
        #[arg(short, long, default_value_t = 0)]
        k: u32,
        /// truthful | schedule:i,j,... | random-alpha[:seed=S] | exhaustive
        #[arg(long, default_value = "truthful")]
        adversary: AdversarySpec,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        debug: DebugArgs,
    },
    /// Sort sampled inputs with a lying comparator
    Sort {
        #[arg(long)]
        n: usize,
        #[arg(short, long, default_value_t = 0)]
        k: u32,
        /// uniform | mallows:Q
        #[arg(long, default_value = "uniform")]
        prior: Prior,
        /// Distribution of the inputs, when different from --prior
        #[arg(long)]
        input_prior: Option<Prior>,
        /// truthful | schedule:i,j,... | exhaustive
        #[arg(long, default_value = "truthful")]
        adversary: AdversarySpec,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = DEFAULT_FORK_BUDGET)]
        fork_budget: u64,
    },
    /// Exhaustively check every answer sequence with at most k lies
    Verify {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value = "2")]
        algo: Algo,
        #[arg(short, long, default_value_t = 0)]
        k: u32,
        /// Number of placements to check
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        debug: DebugArgs,
    },
    /// Optimal worst-case question count with arbitrary questions (n <= 6, k <= 2)
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(short, long, default_value_t = 0)]
        k: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct DistSource {
    /// JSON distribution file
    #[arg(long)]
    dist: Option<PathBuf>,
    /// uniform:N | dyadic:N | geometric:N,P | point
    #[arg(long)]
    gen: Option<String>,
}

#[derive(Args)]
struct DistArgs {
    #[command(flatten)]
    source: DistSource,
    /// Prior used by the searcher when it differs from the true distribution
    #[arg(long)]
    prior_file: Option<PathBuf>,
}

impl DistArgs {
    fn load(&self) -> liarsearch::Result<(ProbabilityVector, Option<ProbabilityVector>)> {
        let mu = match (&self.source.dist, &self.source.gen) {
            (Some(path), _) => ProbabilityVector::load(path)?,
            (None, Some(spec)) => ProbabilityVector::from_spec(spec)?,
            (None, None) => unreachable!("clap requires one source"),
        };
        let eta = self.prior_file.as_deref().map(ProbabilityVector::load).transpose()?;
        Ok((mu, eta))
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Directory for the per-trial CSV and the summary
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 1_000_000)]
    max_questions: u64,
}

#[derive(Args)]
struct DebugArgs {
    /// Replace every radius by this constant (for negative controls)
    #[arg(long, hide = true)]
    debug_radius: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_FORK_BUDGET)]
    fork_budget: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Guard(_) | Error::ForkBudget(_) | Error::QuestionLimit(_) | Error::ThetaCapExceeded { .. } => EXIT_GUARD,
        Error::Precondition(_) | Error::EmptyInterval(_) => EXIT_VIOLATION,
        _ => EXIT_USAGE,
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> liarsearch::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Writes the table and summary under `out`, or prints one of them.
fn emit(
    name: &str,
    csv: String,
    rows_json: serde_json::Value,
    summary_json: String,
    out: Option<&Path>,
    format: Format,
) -> liarsearch::Result<()> {
    match out {
        Some(dir) => {
            write_file(dir, &format!("{name}.csv"), &csv)?;
            write_file(dir, &format!("{name}_summary.json"), &summary_json)?;
            print!("{summary_json}");
        }
        None if format == Format::Csv => print!("{csv}"),
        None => {
            let summary: serde_json::Value = serde_json::from_str(&summary_json)?;
            print!("{}", to_json(&serde_json::json!({ "summary": summary, "rows": rows_json })));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> liarsearch::Result<bool> {
    match cli.command {
        Command::Bounds { dist, k, format } => {
            let (mu, eta) = dist.load()?;
            let report = bounds_report(&mu, k, eta.as_ref())?;
            match format {
                Format::Csv => print!("{}", bounds_csv(&report)),
                Format::Json => print!("{}", to_json(&report)),
            }
            Ok(true)
        }
        Command::Search { dist, algo, k, adversary, run, debug } => {
            let (mu, eta) = dist.load()?;
            let cfg = SearchConfig {
                eta,
                adversary,
                trials: run.trials,
                seed: run.seed,
                workers: run.workers,
                radius_override: debug.debug_radius,
                max_questions: run.max_questions,
                fork_budget: debug.fork_budget,
                ..SearchConfig::new(mu, k, algo)
            };
            let outcome = run_search(&cfg)?;
            let rows = serde_json::to_value(&outcome.rows)?;
            emit("search", search_csv(&outcome.rows), rows, to_json(&outcome.summary), run.out.as_deref(), run.format)?;
            for row in outcome.rows.iter().filter(|r| !r.violations.is_empty()) {
                eprintln!("trial {}: {}", row.trial, row.violations.join("; "));
            }
            Ok(outcome.ok())
        }
        Command::Sort { n, k, prior, input_prior, adversary, run, fork_budget } => {
            let cfg = SortConfig {
                input_prior,
                adversary,
                trials: run.trials,
                seed: run.seed,
                workers: run.workers,
                max_questions: run.max_questions,
                fork_budget,
                ..SortConfig::new(n, k, prior)
            };
            let outcome = run_sort(&cfg)?;
            let rows = serde_json::to_value(&outcome.rows)?;
            emit("sort", sort_csv(&outcome.rows), rows, to_json(&outcome.summary), run.out.as_deref(), run.format)?;
            Ok(outcome.ok())
        }
        Command::Verify { dist, algo, k, trials, seed, workers, format, out, debug } => {
            let (mu, _) = dist.load()?;
            let cfg = VerifyConfig {
                mu,
                k,
                algo,
                seeds: trials,
                seed,
                workers,
                radius_override: debug.debug_radius,
                fork_budget: debug.fork_budget,
            };
            let report = run_verify(&cfg)?;
            let json = to_json(&report);
            if let Some(dir) = &out {
                write_file(dir, "verify.json", &json)?;
            }
            match format {
                Format::Json => print!("{json}"),
                Format::Csv => {
                    println!("name,value");
                    println!("runs,{}", report.runs);
                    println!("valid_runs,{}", report.valid_runs);
                    println!("max_questions,{}", report.max_questions);
                    println!("mean_expected_worst_case,{:.16e}", report.mean_expected_worst_case);
                }
            }
            for f in &report.failures {
                eprintln!("violation: trial {} element {}", f.trial, f.element);
            }
            Ok(report.ok())
        }
        Command::Oracle { n, k, format } => {
            let report = run_oracle(n, k)?;
            match format {
                Format::Json => print!("{}", to_json(&report)),
                Format::Csv => print!("name,value\noptimum,{}\npacking_threshold,{}\n", report.optimum, report.packing_threshold),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VIOLATION),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
