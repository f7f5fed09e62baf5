//! `earlywork`: solve, generate, verify and benchmark early-work instances.
//!
//! Exit status: 0 success, 2 usage error, 3 invalid input, 4 resource limit,
//! 5 internal contract violation (including guarantee violations in `bench`).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use earlywork::bench::{render_report_json, render_table, run_suite, BenchOptions, SuiteSpec};
use earlywork::document::{
    parse_instance, parse_schedule, render_instance, render_schedule, verify, ScheduleDoc,
};
use earlywork::generate::{generate, Distribution, GeneratorSpec};
use earlywork::rounding::parse_fraction;
use earlywork::{
    brute_force, exact_dp, lpt, solve_eptas, solve_fptas, Delta, Error, Instance, OracleBudget,
    Schedule,
};

#[derive(Parser)]
#[command(
    name = "earlywork",
    version,
    about = "Early-work scheduling on identical machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Lpt,
    Bf,
    Dpexact,
    Eptas,
    Fptas,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Lpt => "lpt",
            Algo::Bf => "bf",
            Algo::Dpexact => "dpexact",
            Algo::Eptas => "eptas",
            Algo::Fptas => "fptas",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dist {
    Uniform,
    Boundary,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write a schedule document
    Solve {
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long)]
        input: PathBuf,
        /// Precision as 1/q
        #[arg(long, conflicts_with = "epsilon")]
        delta: Option<String>,
        /// Target accuracy as P/Q; picks q = ⌈10/ε⌉
        #[arg(long)]
        epsilon: Option<String>,
        /// Defaults to stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a seeded instance document
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: u64,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: Dist,
        /// Class grid for the boundary distribution
        #[arg(long, default_value_t = 3)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recompute a schedule document against its instance
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Run an oracle-checked benchmark suite
    Bench {
        /// Suite description; the default suite when omitted
        #[arg(long)]
        suite: Option<PathBuf>,
        /// Machine-readable report
        #[arg(long)]
        output: Option<PathBuf>,
        /// Include wall-clock times in the report
        #[arg(long)]
        timings: bool,
    },
}

enum Failure {
    Usage(String),
    Solver(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())).into())
}

fn write(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Error::Validation(format!("cannot write {}: {e}", p.display())).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn resolve_delta(delta: Option<&str>, epsilon: Option<&str>) -> Result<Delta, Failure> {
    match (delta, epsilon) {
        (Some(d), _) => Ok(d.parse()?),
        (None, Some(e)) => Ok(Delta::from_epsilon(parse_fraction(e)?)?),
        (None, None) => Err(Failure::Usage(
            "this algorithm needs --delta 1/q or --epsilon P/Q".into(),
        )),
    }
}

fn solve(algo: Algo, instance: &Instance, delta: Option<Delta>) -> Result<Schedule, Error> {
    let budget = OracleBudget::default();
    match (algo, delta) {
        (Algo::Lpt, _) => Ok(lpt(instance)),
        (Algo::Bf, _) => brute_force(instance, &budget).map(|(_, s)| s),
        (Algo::Dpexact, _) => exact_dp(instance, &budget).map(|(_, s)| s),
        (Algo::Eptas, Some(d)) => solve_eptas(instance, d),
        (Algo::Fptas, Some(d)) => solve_fptas(instance, d),
        (_, None) => unreachable!("delta resolved for approximation schemes"),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            algo,
            input,
            delta,
            epsilon,
            output,
        } => {
            let instance = parse_instance(&read(&input)?)?;
            let delta = match algo {
                Algo::Eptas | Algo::Fptas => {
                    Some(resolve_delta(delta.as_deref(), epsilon.as_deref())?)
                }
                _ => None,
            };
            let schedule = solve(algo, &instance, delta)?;
            let mut parameters = BTreeMap::new();
            if let Some(d) = delta {
                parameters.insert("q".to_string(), d.q());
            }
            let doc = ScheduleDoc::new(&schedule, algo.name(), parameters);
            write(output.as_deref(), &render_schedule(&doc))
        }
        Command::Gen {
            n,
            m,
            d,
            dist,
            q,
            seed,
            output,
        } => {
            let distribution = match dist {
                Dist::Uniform => Distribution::Uniform,
                Dist::Boundary => Distribution::Boundary { q },
            };
            let instance = generate(&GeneratorSpec {
                n,
                m,
                d,
                distribution,
                seed,
            })?;
            write(output.as_deref(), &render_instance(&instance))
        }
        Command::Verify { input, schedule } => {
            let instance = parse_instance(&read(&input)?)?;
            let doc = parse_schedule(&read(&schedule)?)?;
            let s = verify(&instance, &doc)?;
            println!(
                "ok: {} jobs on {} machines, early work {}",
                instance.job_count(),
                s.machine_count(),
                s.early_work_total
            );
            Ok(())
        }
        Command::Bench {
            suite,
            output,
            timings,
        } => {
            let suite: SuiteSpec = match suite {
                Some(p) => serde_json::from_str(&read(&p)?)
                    .map_err(|e| Error::Validation(format!("suite document: {e}")))?,
                None => SuiteSpec::default(),
            };
            let report = run_suite(&suite, &BenchOptions { timings })?;
            if let Some(p) = output.as_deref() {
                write(Some(p), &render_report_json(&report))?;
            }
            print!("{}", render_table(&report));
            if report.violation_count > 0 {
                return Err(Error::ContractViolation(format!(
                    "{} guarantee violations",
                    report.violation_count
                ))
                .into());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Validation(_) => 3,
                Error::ResourceLimit(_) => 4,
                Error::ContractViolation(_) => 5,
            })
        }
    }
}
