//! Seeded benchmark suites checked against the exact oracles.
//!
//! Every suite instance is solved by the oracles and by each approximation
//! algorithm; the report records values, ratios and gaps, and counts every
//! violated guarantee. A correct build reports zero violations.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::document::{verify, ScheduleDoc};
use crate::eptas::{
    solve_config_ip, solve_eptas, try_enumerate_configurations, ConfigProgram,
    DEFAULT_CONFIGURATION_LIMIT,
};
use crate::error::Result;
use crate::fptas::{dp_solve_rounded, solve_fptas};
use crate::generate::{generate, Distribution, GeneratorSpec};
use crate::instance::{lpt, preprocess, Instance, LptCase, Schedule, Time};
use crate::oracle::{brute_force, exact_dp, OracleBudget};
use crate::rounding::{build_auxiliary, classify, Delta, RoundedInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Uniform,
    Boundary,
}

/// A grid of generated instances: every combination of seed, machine
/// count, job count and distribution yields one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub first_seed: u64,
    pub last_seed: u64,
    pub machines: Vec<usize>,
    pub job_counts: Vec<usize>,
    /// Candidate due dates; each instance draws one from its seed.
    pub due_dates: Vec<Time>,
    pub distributions: Vec<DistributionKind>,
    /// Values of `q` (`δ = 1/q`) the approximation schemes run with.
    pub deltas: Vec<u64>,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        Self {
            first_seed: 1,
            last_seed: 50,
            machines: vec![2, 3],
            job_counts: (4..=9).collect(),
            // multiples of 4 or 9 up to 40
            due_dates: vec![4, 8, 9, 12, 16, 18, 20, 24, 27, 28, 32, 36, 40],
            distributions: vec![DistributionKind::Uniform, DistributionKind::Boundary],
            deltas: vec![2, 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteInstance {
    pub index: usize,
    pub suite_seed: u64,
    pub spec: GeneratorSpec,
    pub instance: Instance,
}

fn instance_seed(seed: u64, m: usize, n: usize, dist: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((m as u64) << 32 | (n as u64) << 16 | dist as u64)
}

pub fn suite_instances(suite: &SuiteSpec) -> Result<Vec<SuiteInstance>> {
    let mut out = Vec::new();
    for seed in suite.first_seed..=suite.last_seed {
        for &m in &suite.machines {
            for &n in &suite.job_counts {
                for (di, &kind) in suite.distributions.iter().enumerate() {
                    let s = instance_seed(seed, m, n, di);
                    let mut rng = ChaCha8Rng::seed_from_u64(s);
                    let d = suite.due_dates[rng.gen_range(0..suite.due_dates.len())];
                    let distribution = match kind {
                        DistributionKind::Uniform => Distribution::Uniform,
                        DistributionKind::Boundary => {
                            let q = suite
                                .deltas
                                .iter()
                                .rev()
                                .copied()
                                .find(|q| d.is_multiple_of(q * q))
                                .or_else(|| suite.deltas.first().copied())
                                .unwrap_or(2);
                            Distribution::Boundary { q }
                        }
                    };
                    let spec = GeneratorSpec {
                        n,
                        m,
                        d,
                        distribution,
                        seed: s,
                    };
                    out.push(SuiteInstance {
                        index: out.len(),
                        suite_seed: seed,
                        instance: generate(&spec)?,
                        spec,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmResult {
    pub algorithm: String,
    pub value: Time,
    pub ratio: f64,
    pub gap: Time,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_us: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundingCheck {
    pub q: u64,
    pub rounded_jobs: usize,
    pub rounded_opt_units: u64,
    pub ip_objective_units: u64,
    pub dp_objective_units: u64,
    pub ip_columns: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub index: usize,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub d: Time,
    pub distribution: Distribution,
    pub jobs: Vec<Time>,
    pub opt: Time,
    pub opt_dp: Time,
    pub fast_path: bool,
    pub core_machines: usize,
    pub results: Vec<AlgorithmResult>,
    pub rounding: Vec<RoundingCheck>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub instances: usize,
    pub min_ratio: f64,
    pub mean_ratio: f64,
    pub max_gap: Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub suite: SuiteSpec,
    pub instances: usize,
    pub summaries: Vec<AlgorithmSummary>,
    pub violation_count: usize,
    pub records: Vec<BenchRecord>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BenchOptions {
    /// Record wall-clock times. Reports are then no longer reproducible
    /// byte for byte.
    pub timings: bool,
}

fn ratio(value: Time, opt: Time) -> f64 {
    if opt == 0 {
        1.0
    } else {
        value as f64 / opt as f64
    }
}

/// `value ≥ opt − 5·m·d/q`, compared exactly.
pub fn within_additive_bound(
    value: Time,
    opt: Time,
    m: usize,
    d: Time,
    q: u64,
    factor: u64,
) -> bool {
    value as i128 * q as i128 >= opt as i128 * q as i128 - (factor * m as u64 * d) as i128
}

/// `value ≥ (1 − 10/q)·opt`, compared exactly.
pub fn within_relative_bound(value: Time, opt: Time, q: u64) -> bool {
    value as i128 * q as i128 >= (q as i128 - 10) * opt as i128
}

/// `p ≥ p̂ ≥ p − d/q² ≥ (1 − 1/q)·p` with `p̂ = size_units·d/q²`.
pub fn rounding_sandwich_holds(p: Time, size_units: u64, d: Time, q: u64) -> bool {
    let (p, s, d, q) = (p as i128, size_units as i128, d as i128, q as i128);
    let qq = q * q;
    // all sides multiplied by q²
    p * qq >= s * d && s * d >= p * qq - d && p * qq - d >= (q - 1) * q * p
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_micros() as u64)
}

struct Checker {
    violations: Vec<String>,
}

impl Checker {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(what());
        }
    }
}

fn rounded_for(core: &Instance, delta: Delta) -> Result<RoundedInstance> {
    let c = classify(core, delta)?;
    Ok(build_auxiliary(core, &c, delta))
}

pub fn bench_instance(
    si: &SuiteInstance,
    deltas: &[u64],
    options: &BenchOptions,
) -> Result<BenchRecord> {
    let budget = OracleBudget::default();
    let instance = &si.instance;
    let (m, d) = (instance.machine_count(), instance.due_date());
    let (opt, _) = brute_force(instance, &budget)?;
    let (opt_dp, _) = exact_dp(instance, &budget)?;
    let mut chk = Checker {
        violations: Vec::new(),
    };
    chk.check(opt == opt_dp, || {
        format!("oracles disagree: {opt} vs {opt_dp}")
    });
    chk.check(opt <= instance.trivial_upper_bound(), || {
        "OPT above min(md, p(J))".into()
    });

    let pre = preprocess(instance)?;
    if let Some(v) = pre.fast_path_value() {
        chk.check(v == opt, || format!("fast path value {v} ≠ OPT {opt}"));
    }
    let removed_value = pre.removed_jobs.len() as Time * d;
    let reduced = pre.reduced_core().cloned();

    let mut results = Vec::new();
    let mut push = |chk: &mut Checker, name: String, schedule: Schedule, us: u64| {
        let doc = ScheduleDoc::new(&schedule, &name, Default::default());
        chk.check(verify(instance, &doc).is_ok(), || {
            format!("{name}: schedule fails verification")
        });
        chk.check(schedule.early_work_total <= opt, || {
            format!("{name}: value above OPT")
        });
        results.push(AlgorithmResult {
            value: schedule.early_work_total,
            ratio: ratio(schedule.early_work_total, opt),
            gap: opt - schedule.early_work_total.min(opt),
            wall_us: options.timings.then_some(us),
            algorithm: name,
        });
    };

    let (lpt_schedule, us) = timed(|| lpt(instance));
    push(&mut chk, "lpt".into(), lpt_schedule, us);

    // LPT dichotomy on every core with p_j < d and p(J) ≤ 2·m'·d, including
    // the ones that preprocessing settles because LPT is already optimal
    if let Some(core) = pre
        .core
        .as_ref()
        .filter(|c| c.total_within_twice_capacity())
    {
        let core_lpt = lpt(core);
        match LptCase::of(&core_lpt, d) {
            LptCase::AllEarly => {
                chk.check(core_lpt.early_work_total + removed_value == opt, || {
                    "LPT all early but not optimal".into()
                });
                chk.check(reduced.is_none(), || "LPT-optimal core not settled".into());
            }
            LptCase::HalfLoaded => {}
            LptCase::Neither => chk.violations.push("LPT dichotomy fails".into()),
        }
    }

    let mut rounding = Vec::new();
    let core_opt = match &reduced {
        Some(core) => {
            let (core_opt, _) = brute_force(core, &budget)?;
            let mc = core.machine_count();
            chk.check(core_opt + removed_value == opt, || {
                "core OPT does not add up".into()
            });
            chk.check(
                core_opt <= mc as Time * d && 2 * core_opt >= mc as Time * d,
                || format!("core OPT {core_opt} outside [m'd/2, m'd] for m' {mc}, d {d}"),
            );
            Some(core_opt)
        }
        None => None,
    };

    for &q in deltas {
        let delta = Delta::new(q)?;
        let (eptas, us) = timed(|| solve_eptas(instance, delta));
        let eptas = eptas?;
        let (fptas, us2) = timed(|| solve_fptas(instance, delta));
        let fptas = fptas?;
        for (name, s) in [("eptas", &eptas), ("fptas", &fptas)] {
            chk.check(
                within_additive_bound(s.early_work_total, opt, m, d, q, 5),
                || format!("{name} 1/{q}: {} < OPT − 5δmd", s.early_work_total),
            );
        }

        if let (Some(core), Some(core_opt)) = (&reduced, core_opt) {
            let mc = core.machine_count();
            let rounded = rounded_for(core, delta)?;
            for b in &rounded.big_jobs {
                let p = core.jobs()[b.job];
                chk.check(rounding_sandwich_holds(p, b.size_units, d, q), || {
                    format!("rounding sandwich fails for p = {p}, q = {q}")
                });
            }
            chk.check(
                rounded.total_units() as u128 * d as u128
                    <= core.total_processing() as u128 * (q * q) as u128,
                || "rounded total exceeds original total".into(),
            );
            chk.check(rounded.job_count() as u64 <= 2 * mc as u64 * q, || {
                format!("n̂ = {} > 2m/δ", rounded.job_count())
            });
            let (rounded_opt, _) = brute_force(&rounded.as_unit_instance(), &budget)?;
            // OPT̂·d/q² ≥ OPT − 4δm'd
            chk.check(
                rounded_opt as i128 * d as i128
                    >= core_opt as i128 * (q * q) as i128 - (4 * mc as u64 * d * q) as i128,
                || format!("OPT̂ below OPT − 4δmd for q = {q}"),
            );
            let configs = try_enumerate_configurations(delta, DEFAULT_CONFIGURATION_LIMIT)?;
            let bound = (3 * q as u128 + 1).checked_pow(delta.class_count() as u32 + 1);
            chk.check(bound.is_none_or(|b| configs.len() as u128 <= b), || {
                "configuration count above (3q+1)^(K+1)".into()
            });
            let program = ConfigProgram::new(&rounded, configs);
            let ip = solve_config_ip(&program)?;
            chk.check(ip.objective_units == rounded_opt, || {
                format!(
                    "IP optimum {} ≠ OPT̂ {rounded_opt} for q = {q}",
                    ip.objective_units
                )
            });
            let (dp_units, _) = dp_solve_rounded(&rounded)?;
            chk.check(dp_units == rounded_opt, || {
                format!("DP optimum {dp_units} ≠ OPT̂ {rounded_opt} for q = {q}")
            });
            for (name, s) in [("eptas", &eptas), ("fptas", &fptas)] {
                let core_value = s.early_work_total - removed_value;
                chk.check(
                    within_additive_bound(core_value, core_opt, mc, d, q, 5),
                    || format!("{name} 1/{q}: core value below OPT − 5δmd"),
                );
                chk.check(within_relative_bound(core_value, core_opt, q), || {
                    format!("{name} 1/{q}: core value below (1 − 10δ)OPT")
                });
            }
            rounding.push(RoundingCheck {
                q,
                rounded_jobs: rounded.job_count(),
                rounded_opt_units: rounded_opt,
                ip_objective_units: ip.objective_units,
                dp_objective_units: dp_units,
                ip_columns: ip.stats.columns,
            });
        }
        push(&mut chk, format!("eptas 1/{q}"), eptas, us);
        push(&mut chk, format!("fptas 1/{q}"), fptas, us2);
    }

    Ok(BenchRecord {
        index: si.index,
        seed: si.suite_seed,
        m,
        n: instance.job_count(),
        d,
        distribution: si.spec.distribution,
        jobs: instance.jobs().to_vec(),
        opt,
        opt_dp,
        fast_path: pre.fast_path.is_some(),
        core_machines: pre.core.as_ref().map_or(0, Instance::machine_count),
        results,
        rounding,
        violations: chk.violations,
    })
}

pub fn run_suite(suite: &SuiteSpec, options: &BenchOptions) -> Result<BenchReport> {
    let records = suite_instances(suite)?
        .iter()
        .map(|si| bench_instance(si, &suite.deltas, options))
        .collect::<Result<Vec<_>>>()?;

    let mut summaries: Vec<AlgorithmSummary> = Vec::new();
    for r in records.iter().flat_map(|r| &r.results) {
        let entry = match summaries
            .iter_mut()
            .position(|s| s.algorithm == r.algorithm)
        {
            Some(pos) => &mut summaries[pos],
            None => {
                summaries.push(AlgorithmSummary {
                    algorithm: r.algorithm.clone(),
                    instances: 0,
                    min_ratio: f64::INFINITY,
                    mean_ratio: 0.0,
                    max_gap: 0,
                });
                summaries.last_mut().expect("just pushed")
            }
        };
        entry.instances += 1;
        entry.min_ratio = entry.min_ratio.min(r.ratio);
        entry.mean_ratio += r.ratio;
        entry.max_gap = entry.max_gap.max(r.gap);
    }
    for s in &mut summaries {
        s.mean_ratio /= s.instances as f64;
    }
    Ok(BenchReport {
        suite: suite.clone(),
        instances: records.len(),
        violation_count: records.iter().map(|r| r.violations.len()).sum(),
        summaries,
        records,
    })
}

pub fn render_report_json(report: &BenchReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_table(report: &BenchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>9} {:>10} {:>10} {:>8}",
        "algorithm", "instances", "min ratio", "mean ratio", "max gap"
    );
    for s in &report.summaries {
        let _ = writeln!(
            out,
            "{:<12} {:>9} {:>10.4} {:>10.4} {:>8}",
            s.algorithm, s.instances, s.min_ratio, s.mean_ratio, s.max_gap
        );
    }
    let _ = writeln!(
        out,
        "instances: {}, violations: {}",
        report.instances, report.violation_count
    );
    for r in report.records.iter().filter(|r| !r.violations.is_empty()) {
        for v in &r.violations {
            let _ = writeln!(out, "  instance {}: {v}", r.index);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_helpers() {
        // OPT 20, m 2, d 10, q 2: 5δmd = 50
        assert!(within_additive_bound(0, 20, 2, 10, 2, 5));
        assert!(!within_additive_bound(9, 20, 2, 10, 20, 5)); // 20 − 5 = 15
        assert!(within_additive_bound(15, 20, 2, 10, 20, 5));
        assert!(within_relative_bound(10, 20, 20));
        assert!(!within_relative_bound(9, 20, 20));
        assert!(within_relative_bound(0, 20, 3));
        assert!(rounding_sandwich_holds(37, 37, 100, 10));
        assert!(!rounding_sandwich_holds(37, 38, 100, 10));
    }

    #[test]
    fn small_suite_has_no_violations() {
        let suite = SuiteSpec {
            first_seed: 1,
            last_seed: 2,
            machines: vec![2, 3],
            job_counts: vec![4, 6],
            ..SuiteSpec::default()
        };
        let report = run_suite(&suite, &BenchOptions::default()).unwrap();
        assert_eq!(report.instances, 16);
        assert_eq!(report.violation_count, 0, "{}", render_table(&report));
        assert_eq!(
            render_report_json(&report),
            render_report_json(&run_suite(&suite, &BenchOptions::default()).unwrap())
        );
    }
}
