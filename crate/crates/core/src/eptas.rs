//! Configuration integer program over the auxiliary instance.
//!
//! A configuration is the per-class job count `u = (u_0, …, u_K)` of one
//! machine, valid when its rounded load is at most `3d` (`3q²` units). Its
//! value is `f(u) = min(load, q²)`. The program chooses how many machines
//! `x_u` get each configuration:
//!
//! ```text
//! max Σ f(u)·x_u   s.t.  Σ u_k·x_u ≤ n̂_k  (k = 0..=K),   Σ x_u = m,   x ∈ ℤ≥0
//! ```
//!
//! and is solved exactly by best-bound branch-and-bound on top of the exact
//! rational simplex in [`crate::lp`].

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{contract, resource, Result};
use crate::instance::{Instance, Schedule};
use crate::lp::{int, maximize, Constraint, LpOutcome, Sense};
use crate::rounding::{solve_with_rounded_solver, Delta, RoundedInstance, RoundedSchedule};

/// Per-class job counts of one machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    counts: Vec<u32>,
    load_units: u64,
    value_units: u64,
}

impl Configuration {
    /// Returns `None` when the load exceeds `3q²` units.
    pub fn new(counts: Vec<u32>, delta: Delta) -> Option<Self> {
        assert_eq!(counts.len(), delta.class_count() + 1, "one count per class");
        let load_units: u64 = counts
            .iter()
            .enumerate()
            .map(|(k, &u)| u as u64 * delta.class_size_units(k))
            .sum();
        if load_units > 3 * delta.units_per_due_date() {
            return None;
        }
        Some(Self {
            value_units: load_units.min(delta.units_per_due_date()),
            counts,
            load_units,
        })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn load_units(&self) -> u64 {
        self.load_units
    }

    /// `f = min(load, q²)`.
    pub fn value_units(&self) -> u64 {
        self.value_units
    }

    pub fn job_count(&self) -> u64 {
        self.counts.iter().map(|&u| u as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.load_units == 0
    }
}

/// Default cap on the number of enumerated configurations.
pub const DEFAULT_CONFIGURATION_LIMIT: usize = 5_000_000;
/// Default cap on branch-and-bound nodes.
pub const DEFAULT_NODE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EptasOptions {
    pub max_configurations: usize,
    pub max_nodes: usize,
}

impl Default for EptasOptions {
    fn default() -> Self {
        Self {
            max_configurations: DEFAULT_CONFIGURATION_LIMIT,
            max_nodes: DEFAULT_NODE_LIMIT,
        }
    }
}

/// All valid configurations in lexicographic order of their count vectors.
pub fn enumerate_configurations(delta: Delta) -> Vec<Configuration> {
    try_enumerate_configurations(delta, usize::MAX).expect("unbounded enumeration")
}

/// Like [`enumerate_configurations`], but fails once more than `limit`
/// configurations exist.
pub fn try_enumerate_configurations(delta: Delta, limit: usize) -> Result<Vec<Configuration>> {
    let sizes: Vec<u64> = (0..=delta.class_count())
        .map(|k| delta.class_size_units(k))
        .collect();
    let mut out = Vec::new();
    let mut counts = vec![0u32; sizes.len()];
    let capacity = 3 * delta.units_per_due_date();
    if !descend(&sizes, 0, capacity, &mut counts, &mut out, limit) {
        return Err(resource(format!(
            "more than {limit} valid configurations for δ = {delta}; use a coarser δ"
        )));
    }
    Ok(out
        .into_iter()
        .map(|c| Configuration::new(c, delta).expect("enumerated within capacity"))
        .collect())
}

fn descend(
    sizes: &[u64],
    class: usize,
    remaining: u64,
    counts: &mut [u32],
    out: &mut Vec<Vec<u32>>,
    limit: usize,
) -> bool {
    if class == sizes.len() {
        if out.len() >= limit {
            return false;
        }
        out.push(counts.to_vec());
        return true;
    }
    for t in 0..=remaining / sizes[class] {
        counts[class] = t as u32;
        if !descend(
            sizes,
            class + 1,
            remaining - t * sizes[class],
            counts,
            out,
            limit,
        ) {
            return false;
        }
    }
    counts[class] = 0;
    true
}

/// The configuration integer program of one auxiliary instance.
#[derive(Debug, Clone)]
pub struct ConfigProgram {
    pub delta: Delta,
    pub configurations: Vec<Configuration>,
    /// `n̂_k` for `k = 0..=K`.
    pub capacities: Vec<u64>,
    pub machines: u64,
}

impl ConfigProgram {
    pub fn new(rounded: &RoundedInstance, configurations: Vec<Configuration>) -> Self {
        Self {
            delta: rounded.delta,
            configurations,
            capacities: rounded.capacities.clone(),
            machines: rounded.machines as u64,
        }
    }

    fn fits(&self, c: &Configuration) -> bool {
        c.counts
            .iter()
            .zip(&self.capacities)
            .all(|(&u, &n)| u as u64 <= n)
    }

    /// Indices of the configurations an optimal solution needs.
    ///
    /// Drops configurations that exceed some capacity on their own, and
    /// configurations that stay at or above `q²` after removing one job:
    /// the smaller configuration has the same value and uses less.
    pub fn useful_columns(&self) -> Vec<usize> {
        let cap = self.delta.units_per_due_date();
        self.configurations
            .iter()
            .enumerate()
            .filter(|(_, c)| self.fits(c))
            .filter(|(_, c)| {
                let smallest = c
                    .counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &u)| u > 0)
                    .map(|(k, _)| self.delta.class_size_units(k))
                    .min();
                match smallest {
                    Some(s) => c.load_units <= cap || c.load_units - s < cap,
                    None => true,
                }
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Progress record of the branch-and-bound search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: usize,
    pub columns: usize,
    pub root_bound: u64,
    /// Best known objective after each node.
    pub incumbent_trace: Vec<u64>,
    /// Proven upper bound after each node.
    pub bound_trace: Vec<u64>,
}

impl SearchStats {
    pub fn final_gap(&self) -> u64 {
        match (self.bound_trace.last(), self.incumbent_trace.last()) {
            (Some(b), Some(i)) => b - i,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConfigSolution {
    /// Configurations with `x_u > 0`, in program order.
    pub counts: Vec<(Configuration, u64)>,
    pub objective_units: u64,
    pub stats: SearchStats,
}

impl ConfigSolution {
    pub fn machines_used(&self) -> u64 {
        self.counts.iter().map(|(_, x)| x).sum()
    }
}

#[derive(Debug, Clone)]
struct Node {
    bound: u64,
    seq: u64,
    /// Per column `(lower, upper)` bounds introduced by branching.
    lower: Vec<(usize, u64)>,
    upper: Vec<(usize, u64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.bound, Reverse(self.seq)).cmp(&(other.bound, Reverse(other.seq)))
    }
}

struct Relaxation {
    x: Vec<BigRational>,
    objective: BigRational,
}

struct Search<'a> {
    program: &'a ConfigProgram,
    columns: Vec<usize>,
    rows: Vec<usize>,
}

impl Search<'_> {
    fn config(&self, col: usize) -> &Configuration {
        &self.program.configurations[self.columns[col]]
    }

    fn relax(&self, node: &Node) -> Result<Option<Relaxation>> {
        let objective: Vec<BigRational> = (0..self.columns.len())
            .map(|c| int(self.config(c).value_units))
            .collect();
        let mut constraints: Vec<Constraint> = self
            .rows
            .iter()
            .map(|&k| Constraint {
                terms: (0..self.columns.len())
                    .filter(|&c| self.config(c).counts[k] > 0)
                    .map(|c| (c, int(self.config(c).counts[k] as u64)))
                    .collect(),
                sense: Sense::Le,
                rhs: int(self.program.capacities[k]),
            })
            .collect();
        constraints.push(Constraint {
            terms: (0..self.columns.len()).map(|c| (c, int(1))).collect(),
            sense: Sense::Eq,
            rhs: int(self.program.machines),
        });
        for &(c, lo) in &node.lower {
            constraints.push(Constraint {
                terms: vec![(c, int(1))],
                sense: Sense::Ge,
                rhs: int(lo),
            });
        }
        for &(c, hi) in &node.upper {
            constraints.push(Constraint {
                terms: vec![(c, int(1))],
                sense: Sense::Le,
                rhs: int(hi),
            });
        }
        match maximize(&objective, &constraints) {
            LpOutcome::Optimal { x, objective } => Ok(Some(Relaxation { x, objective })),
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => Err(contract("configuration LP cannot be unbounded")),
        }
    }

    /// Rounds an LP point down and fills the freed machines greedily with
    /// the most valuable configuration that still fits.
    fn round(&self, x: &[BigRational]) -> (Vec<u64>, u64) {
        let mut counts: Vec<u64> = x.iter().map(floor_u64).collect();
        let mut residual = self.program.capacities.clone();
        for (c, &n) in counts.iter().enumerate() {
            for (k, &u) in self.config(c).counts.iter().enumerate() {
                residual[k] -= u as u64 * n;
            }
        }
        let mut free = self.program.machines - counts.iter().sum::<u64>();
        while free > 0 {
            let pick = (0..self.columns.len())
                .filter(|&c| {
                    self.config(c)
                        .counts
                        .iter()
                        .zip(&residual)
                        .all(|(&u, &r)| u as u64 <= r)
                })
                .max_by_key(|&c| (self.config(c).value_units, Reverse(c)))
                .expect("the empty configuration always fits");
            let cfg = self.config(pick);
            let times = if cfg.is_empty() {
                free
            } else {
                let fit = cfg
                    .counts
                    .iter()
                    .zip(&residual)
                    .filter(|(&u, _)| u > 0)
                    .map(|(&u, &r)| r / u as u64)
                    .min()
                    .unwrap_or(free);
                fit.min(free)
            };
            for (k, &u) in cfg.counts.iter().enumerate() {
                residual[k] -= u as u64 * times;
            }
            counts[pick] += times;
            free -= times;
        }
        let value = counts
            .iter()
            .enumerate()
            .map(|(c, &n)| n * self.config(c).value_units)
            .sum();
        (counts, value)
    }
}

fn floor_u64(v: &BigRational) -> u64 {
    v.floor()
        .to_integer()
        .to_u64()
        .expect("LP values are non-negative and bounded by m")
}

pub fn solve_config_ip(program: &ConfigProgram) -> Result<ConfigSolution> {
    solve_config_ip_with(program, &EptasOptions::default())
}

pub fn solve_config_ip_with(
    program: &ConfigProgram,
    options: &EptasOptions,
) -> Result<ConfigSolution> {
    let columns = program.useful_columns();
    if !columns
        .iter()
        .any(|&c| program.configurations[c].is_empty())
    {
        return Err(contract(
            "configuration set lacks the empty configuration; the program may be infeasible",
        ));
    }
    let rows: Vec<usize> = (0..program.capacities.len())
        .filter(|&k| {
            columns
                .iter()
                .any(|&c| program.configurations[c].counts[k] > 0)
        })
        .collect();
    let search = Search {
        program,
        columns,
        rows,
    };
    let mut stats = SearchStats {
        columns: search.columns.len(),
        ..SearchStats::default()
    };

    let root = Node {
        bound: u64::MAX,
        seq: 0,
        lower: Vec::new(),
        upper: Vec::new(),
    };
    let root_lp = search
        .relax(&root)?
        .ok_or_else(|| contract("configuration LP infeasible at the root"))?;
    let (mut best_counts, mut best_value) = search.round(&root_lp.x);
    stats.root_bound = floor_u64(&root_lp.objective);

    let mut queue = BinaryHeap::new();
    let mut seq = 0;
    queue.push(Node {
        bound: stats.root_bound,
        ..root
    });
    let mut pending_root = Some(root_lp);

    while let Some(node) = queue.pop() {
        stats.nodes += 1;
        if stats.nodes > options.max_nodes {
            return Err(resource(format!(
                "branch-and-bound exceeded {} nodes; use a coarser δ",
                options.max_nodes
            )));
        }
        if node.bound <= best_value {
            // Best-first: nothing left can beat the incumbent.
            stats.incumbent_trace.push(best_value);
            stats.bound_trace.push(best_value);
            break;
        }
        let lp = match pending_root.take() {
            Some(lp) => Some(lp),
            None => search.relax(&node)?,
        };
        let outcome = lp.and_then(|lp| {
            let bound = floor_u64(&lp.objective);
            (bound > best_value).then_some((lp, bound))
        });
        if let Some((lp, bound)) = outcome {
            let (counts, value) = search.round(&lp.x);
            if value > best_value {
                best_value = value;
                best_counts = counts;
            }
            let fractional =
                lp.x.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_integer())
                    .map(|(c, v)| (v - v.floor(), c))
                    .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            match fractional {
                None => {
                    // Integral LP optimum; rounding reproduced it.
                    debug_assert_eq!(value, bound);
                }
                Some((_, c)) if bound > best_value => {
                    let v = &lp.x[c];
                    let down = floor_u64(v);
                    let mut left = node.clone();
                    left.upper.push((c, down));
                    let mut right = node.clone();
                    right.lower.push((c, down + 1));
                    for mut child in [left, right] {
                        seq += 1;
                        child.seq = seq;
                        child.bound = bound;
                        queue.push(child);
                    }
                }
                Some(_) => {}
            }
        }
        let open = queue.peek().map_or(0, |n| n.bound);
        stats.incumbent_trace.push(best_value);
        stats.bound_trace.push(open.max(best_value));
    }

    let counts = best_counts
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(c, &n)| (search.config(c).clone(), n))
        .collect();
    Ok(ConfigSolution {
        counts,
        objective_units: best_value,
        stats,
    })
}

/// Expands a solution into one configuration per machine and fills the slots
/// with concrete jobs.
///
/// Machines receive configurations by descending value (ties in program
/// order); class slots take big jobs by ascending original index.
pub fn assemble_rounded_schedule(
    solution: &ConfigSolution,
    rounded: &RoundedInstance,
) -> Result<RoundedSchedule> {
    if solution.machines_used() != rounded.machines as u64 {
        return Err(contract(format!(
            "solution places {} machines, instance has {}",
            solution.machines_used(),
            rounded.machines
        )));
    }
    let mut order: Vec<&(Configuration, u64)> = solution.counts.iter().collect();
    order.sort_by_key(|(c, _)| Reverse(c.value_units));

    let classes = rounded.capacities.len();
    let mut pools: Vec<std::vec::IntoIter<usize>> = (0..classes)
        .map(|k| {
            rounded
                .big_jobs
                .iter()
                .filter(|b| b.class == k)
                .map(|b| b.job)
                .collect::<Vec<_>>()
                .into_iter()
        })
        .collect();
    let mut small_left = rounded.small_count;
    let mut small_counts = Vec::with_capacity(rounded.machines);
    let mut big = Vec::with_capacity(rounded.machines);
    for (cfg, times) in order {
        if cfg.counts.len() != classes {
            return Err(contract("configuration has the wrong number of classes"));
        }
        for _ in 0..*times {
            let u0 = cfg.counts[0] as usize;
            small_left = small_left
                .checked_sub(u0)
                .ok_or_else(|| contract("solution uses more small blocks than exist"))?;
            small_counts.push(u0);
            let mut jobs = Vec::new();
            for (k, &u) in cfg.counts.iter().enumerate().skip(1) {
                for _ in 0..u {
                    let j = pools[k].next().ok_or_else(|| {
                        contract(format!("solution exceeds capacity of class {k}"))
                    })?;
                    jobs.push(j);
                }
            }
            jobs.sort_unstable();
            big.push(jobs);
        }
    }
    RoundedSchedule::new(rounded, small_counts, big)
}

/// Solves the auxiliary instance through the configuration program.
pub fn solve_rounded_eptas(
    rounded: &RoundedInstance,
    options: &EptasOptions,
) -> Result<RoundedSchedule> {
    let configurations = try_enumerate_configurations(rounded.delta, options.max_configurations)?;
    let program = ConfigProgram::new(rounded, configurations);
    let solution = solve_config_ip_with(&program, options)?;
    assemble_rounded_schedule(&solution, rounded)
}

pub fn solve_eptas(instance: &Instance, delta: Delta) -> Result<Schedule> {
    solve_eptas_with(instance, delta, &EptasOptions::default())
}

pub fn solve_eptas_with(
    instance: &Instance,
    delta: Delta,
    options: &EptasOptions,
) -> Result<Schedule> {
    solve_with_rounded_solver(instance, delta, |rounded| {
        solve_rounded_eptas(rounded, options)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rounding::{build_auxiliary, classify};

    fn d2() -> Delta {
        Delta::new(2).unwrap()
    }

    fn worked_rounded() -> (Instance, RoundedInstance) {
        let i = Instance::new(vec![3, 3, 2, 1], 2, 4).unwrap();
        let c = classify(&i, d2()).unwrap();
        let r = build_auxiliary(&i, &c, d2());
        (i, r)
    }

    #[test]
    fn validity_of_sample_configurations() {
        assert_eq!(
            Configuration::new(vec![6, 0, 0], d2())
                .unwrap()
                .load_units(),
            12
        );
        assert!(Configuration::new(vec![0, 0, 5], d2()).is_none());
        let c = Configuration::new(vec![2, 1, 2], d2()).unwrap();
        assert_eq!(c.load_units(), 12);
        assert_eq!(c.value_units(), 4);
        let e = Configuration::new(vec![0, 0, 0], d2()).unwrap();
        assert!(e.is_empty());
        assert_eq!(e.value_units(), 0);
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let all = enumerate_configurations(d2());
        assert_eq!(all.len(), 57);
        assert!(all.windows(2).all(|w| w[0].counts < w[1].counts));
        assert!(all[0].is_empty());
        assert!(all.iter().all(|c| c.job_count() <= 6));
        assert!(all.iter().any(|c| c.counts() == [2, 1, 2]));
        assert!(!all.iter().any(|c| c.counts() == [0, 0, 5]));
    }

    #[test]
    fn enumeration_budget() {
        let err = try_enumerate_configurations(Delta::new(3).unwrap(), 100).unwrap_err();
        assert!(matches!(err, crate::Error::ResourceLimit(_)));
        assert_eq!(
            try_enumerate_configurations(Delta::new(3).unwrap(), 1103)
                .unwrap()
                .len(),
            1103
        );
    }

    #[test]
    fn worked_program_optimum() {
        let (_, r) = worked_rounded();
        let program = ConfigProgram::new(&r, enumerate_configurations(d2()));
        let sol = solve_config_ip(&program).unwrap();
        assert_eq!(sol.objective_units, 7);
        let mut used: Vec<(Vec<u32>, u64)> = sol
            .counts
            .iter()
            .map(|(c, n)| (c.counts().to_vec(), *n))
            .collect();
        used.sort();
        assert_eq!(used, vec![(vec![0, 0, 1], 1), (vec![0, 1, 1], 1)]);
        assert_eq!(sol.stats.final_gap(), 0);

        let rs = assemble_rounded_schedule(&sol, &r).unwrap();
        assert_eq!(rs.big_jobs, vec![vec![0, 2], vec![1]]);
        assert_eq!(rs.value_units, 7);
    }

    #[test]
    fn no_jobs_gives_empty_machines() {
        let i = Instance::new(vec![], 3, 4).unwrap();
        let c = classify(&i, d2()).unwrap();
        let r = build_auxiliary(&i, &c, d2());
        let sol = solve_config_ip(&ConfigProgram::new(&r, enumerate_configurations(d2()))).unwrap();
        assert_eq!(sol.objective_units, 0);
        assert_eq!(sol.counts.len(), 1);
        assert!(sol.counts[0].0.is_empty());
        assert_eq!(sol.counts[0].1, 3);
        let rs = assemble_rounded_schedule(&sol, &r).unwrap();
        assert!(rs.big_jobs.iter().all(Vec::is_empty));
        assert_eq!(rs.small_counts, vec![0, 0, 0]);
    }

    #[test]
    fn abundant_single_class() {
        // q = 2: 40 class-1 jobs (2 units each), m = 3 → every machine capped at 4 units
        let delta = d2();
        let program = ConfigProgram {
            delta,
            configurations: enumerate_configurations(delta),
            capacities: vec![0, 40, 0],
            machines: 3,
        };
        let sol = solve_config_ip(&program).unwrap();
        assert_eq!(sol.objective_units, 12);
    }

    #[test]
    fn leftover_small_blocks_are_recorded() {
        let delta = d2();
        // d = 8: blocks of 4, ten jobs of 3 → n̂_0 = ⌊30/4⌋ = 7
        let i = Instance::new(vec![3; 10], 2, 8).unwrap();
        let c = classify(&i, delta).unwrap();
        let r = build_auxiliary(&i, &c, delta);
        assert_eq!(r.small_count, 7);
        let sol =
            solve_config_ip(&ConfigProgram::new(&r, enumerate_configurations(delta))).unwrap();
        assert_eq!(sol.objective_units, 8);
        let rs = assemble_rounded_schedule(&sol, &r).unwrap();
        assert_eq!(rs.small_used(), 4);
        assert_eq!(r.small_count - rs.small_used(), 3);
    }

    #[test]
    fn assemble_rejects_overuse() {
        let (_, r) = worked_rounded();
        let cfg = Configuration::new(vec![0, 2, 0], d2()).unwrap();
        let empty = Configuration::new(vec![0, 0, 0], d2()).unwrap();
        let bogus = ConfigSolution {
            counts: vec![(cfg, 1), (empty.clone(), 1)],
            objective_units: 4,
            stats: SearchStats::default(),
        };
        assert!(matches!(
            assemble_rounded_schedule(&bogus, &r),
            Err(crate::Error::ContractViolation(_))
        ));
        let short = ConfigSolution {
            counts: vec![(empty, 1)],
            objective_units: 0,
            stats: SearchStats::default(),
        };
        assert!(assemble_rounded_schedule(&short, &r).is_err());
    }

    #[test]
    fn eptas_worked_example() {
        let (i, _) = worked_rounded();
        let s = solve_eptas(&i, d2()).unwrap();
        assert_eq!(s.early_work_total, 8);
    }

    #[test]
    fn eptas_fast_path_bypass() {
        let i = Instance::new(vec![1; 9], 2, 2).unwrap();
        let s = solve_eptas(&i, d2()).unwrap();
        assert_eq!(s.machine_loads, vec![3, 6]);
    }
}
