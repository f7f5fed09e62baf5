//! Rounding of an instance onto the `δ²d` grid.
//!
//! With `δ = 1/q`, jobs shorter than `δd` are *small*; the remaining jobs
//! fall into `K = q(q−1)` classes of width `δ²d`. The auxiliary instance
//! replaces the small jobs by `⌊p(J⁰)/(δd)⌋` blocks of length `δd` and rounds
//! every big job down to the lower end of its class.
//!
//! All rounded quantities are kept in integer *grid units* of `d/q²`, so the
//! due date is exactly `q²` units and no rational arithmetic is needed
//! downstream.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{contract, validation, Error, Result};
use crate::instance::{evaluate, preprocess, Instance, Schedule, Time};

/// Precision `δ = 1/q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Delta {
    q: u64,
}

impl Delta {
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(validation(format!("δ = 1/{q} is too coarse, need q ≥ 2")));
        }
        Ok(Self { q })
    }

    /// Largest `δ = 1/q` with `δ ≤ ε/10`, i.e. `q = ⌈10/ε⌉`.
    pub fn from_epsilon(epsilon: Ratio<u64>) -> Result<Self> {
        let (num, den) = (*epsilon.numer(), *epsilon.denom());
        if num == 0 || num >= den {
            return Err(validation(format!("ε = {epsilon} is outside (0, 1)")));
        }
        Self::new(Integer::div_ceil(&(10 * den), &num))
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Number of big-job classes, `K = (1−δ)/δ² = q(q−1)`.
    pub fn class_count(&self) -> usize {
        (self.q * (self.q - 1)) as usize
    }

    /// The due date measured in grid units, `q²`.
    pub fn units_per_due_date(&self) -> u64 {
        self.q * self.q
    }

    /// Rounded length of a class-`k` job in grid units; class 0 is the
    /// small-job block of length `δd`.
    pub fn class_size_units(&self, class: usize) -> u64 {
        if class == 0 {
            self.q
        } else {
            self.q + class as u64 - 1
        }
    }

    pub fn as_ratio(&self) -> Ratio<u64> {
        Ratio::new(1, self.q)
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}", self.q)
    }
}

impl FromStr for Delta {
    type Err = Error;

    /// Accepts `1/q` (or any fraction equal to one).
    fn from_str(s: &str) -> Result<Self> {
        let r = parse_fraction(s)?;
        if *r.numer() != 1 {
            return Err(validation(format!("δ = {s} is not of the form 1/q")));
        }
        Self::new(*r.denom())
    }
}

/// Parses `P/Q` (or a bare integer) into a reduced fraction.
pub fn parse_fraction(s: &str) -> Result<Ratio<u64>> {
    let bad = || validation(format!("cannot parse fraction {s:?}"));
    let (num, den) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: u64 = num.parse().map_err(|_| bad())?;
    let den: u64 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(num, den))
}

/// Partition of the jobs into small jobs and big classes `1..=K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// Small jobs in ascending index order.
    pub small_jobs: Vec<usize>,
    /// `class_of[j]` is 0 for small jobs, otherwise the class of job `j`.
    pub class_of: Vec<usize>,
    /// `n_k` for `k = 0..=K`.
    pub class_counts: Vec<usize>,
}

impl Classification {
    pub fn big_class(&self, job: usize) -> Option<usize> {
        match self.class_of.get(job) {
            Some(&k) if k > 0 => Some(k),
            _ => None,
        }
    }

    pub fn is_small(&self, job: usize) -> bool {
        self.class_of.get(job) == Some(&0)
    }
}

/// Class of a job of length `p < d`: `k = ⌊p·q²/d⌋ − q + 1` when `p ≥ d/q`.
pub fn class_of(p: Time, due_date: Time, delta: Delta) -> usize {
    let q = delta.q() as u128;
    let scaled = p as u128 * q * q / due_date as u128;
    if scaled < q {
        0
    } else {
        (scaled - q + 1) as usize
    }
}

pub fn classify(instance: &Instance, delta: Delta) -> Result<Classification> {
    let d = instance.due_date();
    let mut counts = vec![0; delta.class_count() + 1];
    let mut class_of_job = Vec::with_capacity(instance.job_count());
    let mut small = Vec::new();
    for (j, &p) in instance.jobs().iter().enumerate() {
        if p >= d {
            return Err(contract(format!(
                "job {j} has p = {p} ≥ d = {d}; preprocess before classifying"
            )));
        }
        let k = class_of(p, d, delta);
        if k == 0 {
            small.push(j);
        }
        counts[k] += 1;
        class_of_job.push(k);
    }
    Ok(Classification {
        small_jobs: small,
        class_of: class_of_job,
        class_counts: counts,
    })
}

/// A big job of the auxiliary instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundedJob {
    /// Index of the original job.
    pub job: usize,
    pub class: usize,
    /// `q + k − 1`.
    pub size_units: u64,
}

/// The auxiliary instance in grid units.
///
/// Its jobs are ordered as all small blocks first, then the big jobs by
/// ascending original index; [`RoundedInstance::job_sizes_units`] follows
/// that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundedInstance {
    pub delta: Delta,
    pub due_date: Time,
    pub machines: usize,
    /// `n̂_0`, each block `q` units long.
    pub small_count: usize,
    pub big_jobs: Vec<RoundedJob>,
    /// `n̂_k` for `k = 0..=K`.
    pub capacities: Vec<u64>,
}

impl RoundedInstance {
    pub fn units_per_due_date(&self) -> u64 {
        self.delta.units_per_due_date()
    }

    pub fn small_size_units(&self) -> u64 {
        self.delta.q()
    }

    pub fn job_count(&self) -> usize {
        self.small_count + self.big_jobs.len()
    }

    pub fn job_sizes_units(&self) -> Vec<u64> {
        std::iter::repeat_n(self.small_size_units(), self.small_count)
            .chain(self.big_jobs.iter().map(|b| b.size_units))
            .collect()
    }

    pub fn total_units(&self) -> u64 {
        self.job_sizes_units().iter().sum()
    }

    /// The auxiliary instance as a plain [`Instance`] with `d = q²`.
    pub fn as_unit_instance(&self) -> Instance {
        Instance::new(
            self.job_sizes_units(),
            self.machines,
            self.units_per_due_date(),
        )
        .expect("rounded sizes are positive")
    }

    /// Length of `units` grid units in original time units.
    pub fn units_in_time(&self, units: u64) -> Ratio<u64> {
        Ratio::new(units * self.due_date, self.units_per_due_date())
    }

    pub fn big_job_position(&self, job: usize) -> Option<usize> {
        self.big_jobs.binary_search_by_key(&job, |b| b.job).ok()
    }
}

/// Number of `δd` blocks that fit into `total` time units: `⌊total·q/d⌋`.
fn block_count(total: Time, due_date: Time, delta: Delta) -> usize {
    (total as u128 * delta.q() as u128 / due_date as u128) as usize
}

pub fn build_auxiliary(
    instance: &Instance,
    classification: &Classification,
    delta: Delta,
) -> RoundedInstance {
    let d = instance.due_date();
    let small_total: Time = classification
        .small_jobs
        .iter()
        .map(|&j| instance.jobs()[j])
        .sum();
    let small_count = block_count(small_total, d, delta);
    let big_jobs: Vec<RoundedJob> = classification
        .class_of
        .iter()
        .enumerate()
        .filter(|&(_, &k)| k > 0)
        .map(|(job, &class)| RoundedJob {
            job,
            class,
            size_units: delta.class_size_units(class),
        })
        .collect();
    let mut capacities = vec![0u64; delta.class_count() + 1];
    capacities[0] = small_count as u64;
    for b in &big_jobs {
        capacities[b.class] += 1;
    }
    RoundedInstance {
        delta,
        due_date: d,
        machines: instance.machine_count(),
        small_count,
        big_jobs,
        capacities,
    }
}

/// A (possibly partial) schedule of the auxiliary instance.
///
/// Machines hold a count of small blocks plus explicit big jobs, referenced
/// by original job index. Blocks and big jobs that are not placed anywhere
/// are dealt with when lifting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundedSchedule {
    pub small_counts: Vec<usize>,
    pub big_jobs: Vec<Vec<usize>>,
    pub load_units: Vec<u64>,
    pub value_units: u64,
}

impl RoundedSchedule {
    pub fn new(
        rounded: &RoundedInstance,
        small_counts: Vec<usize>,
        big_jobs: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let m = rounded.machines;
        if small_counts.len() != m || big_jobs.len() != m {
            return Err(validation(format!(
                "rounded schedule must describe exactly {m} machines"
            )));
        }
        let used: usize = small_counts.iter().sum();
        if used > rounded.small_count {
            return Err(validation(format!(
                "rounded schedule uses {used} small blocks, only {} exist",
                rounded.small_count
            )));
        }
        let mut seen = vec![false; rounded.big_jobs.len()];
        let mut load_units = Vec::with_capacity(m);
        for (i, jobs) in big_jobs.iter().enumerate() {
            let mut load = small_counts[i] as u64 * rounded.small_size_units();
            for &j in jobs {
                let pos = rounded
                    .big_job_position(j)
                    .ok_or_else(|| validation(format!("job {j} is not a big job")))?;
                if std::mem::replace(&mut seen[pos], true) {
                    return Err(validation(format!("big job {j} placed twice")));
                }
                load += rounded.big_jobs[pos].size_units;
            }
            load_units.push(load);
        }
        let cap = rounded.units_per_due_date();
        let value_units = load_units.iter().map(|&l| l.min(cap)).sum();
        Ok(Self {
            small_counts,
            big_jobs,
            load_units,
            value_units,
        })
    }

    /// Builds a schedule from a machine per auxiliary job, in the order of
    /// [`RoundedInstance::job_sizes_units`].
    pub fn from_item_assignment(rounded: &RoundedInstance, machine_of: &[usize]) -> Result<Self> {
        if machine_of.len() != rounded.job_count() {
            return Err(validation(
                "item assignment does not cover the auxiliary jobs",
            ));
        }
        let m = rounded.machines;
        let mut small = vec![0; m];
        let mut big = vec![Vec::new(); m];
        for (pos, &i) in machine_of.iter().enumerate() {
            if i >= m {
                return Err(validation(format!("machine {i} out of range")));
            }
            if pos < rounded.small_count {
                small[i] += 1;
            } else {
                big[i].push(rounded.big_jobs[pos - rounded.small_count].job);
            }
        }
        Self::new(rounded, small, big)
    }

    pub fn small_used(&self) -> usize {
        self.small_counts.iter().sum()
    }
}

/// Turns a schedule of the auxiliary instance into a schedule of `instance`.
///
/// Big jobs follow their rounded counterparts. Small jobs are dealt in
/// ascending index: machine `i` with `c_i` blocks takes small jobs until
/// their total first exceeds `(c_i − 1)·δd` (none when `c_i = 0`). Every
/// job still unplaced then goes to the least-loaded machine.
pub fn lift_solution(
    instance: &Instance,
    classification: &Classification,
    delta: Delta,
    rounded_schedule: &RoundedSchedule,
) -> Result<Schedule> {
    let m = instance.machine_count();
    let d = instance.due_date() as u128;
    let q = delta.q() as u128;
    let small_total: Time = classification
        .small_jobs
        .iter()
        .map(|&j| instance.jobs()[j])
        .sum();
    if rounded_schedule.small_counts.len() != m || rounded_schedule.big_jobs.len() != m {
        return Err(validation(format!(
            "rounded schedule must describe exactly {m} machines"
        )));
    }
    if rounded_schedule.small_used() > block_count(small_total, instance.due_date(), delta) {
        return Err(validation(
            "rounded schedule uses more small blocks than exist",
        ));
    }

    let mut machine_of: Vec<Option<usize>> = vec![None; instance.job_count()];
    let mut loads = vec![0 as Time; m];
    for (i, jobs) in rounded_schedule.big_jobs.iter().enumerate() {
        for &j in jobs {
            if classification.big_class(j).is_none() {
                return Err(validation(format!("job {j} is not a big job")));
            }
            if machine_of[j].replace(i).is_some() {
                return Err(validation(format!("big job {j} placed twice")));
            }
            loads[i] += instance.jobs()[j];
        }
    }

    let mut small = classification.small_jobs.iter().copied().peekable();
    for (i, &blocks) in rounded_schedule.small_counts.iter().enumerate() {
        if blocks == 0 {
            continue;
        }
        let threshold = (blocks as u128 - 1) * d;
        let mut small_load: u128 = 0;
        while small_load * q <= threshold {
            let Some(j) = small.next() else { break };
            machine_of[j] = Some(i);
            small_load += instance.jobs()[j] as u128;
            loads[i] += instance.jobs()[j];
        }
    }

    let mut heap: BinaryHeap<Reverse<(Time, usize)>> = loads
        .iter()
        .enumerate()
        .map(|(i, &c)| Reverse((c, i)))
        .collect();
    for (slot, &p) in machine_of.iter_mut().zip(instance.jobs()) {
        if slot.is_none() {
            let Reverse((load, i)) = heap.pop().expect("at least one machine");
            *slot = Some(i);
            heap.push(Reverse((load + p, i)));
        }
    }
    let assignment: Vec<usize> = machine_of.into_iter().map(Option::unwrap).collect();
    evaluate(instance, &assignment)
}

/// Runs the full rounding pipeline around a solver for the auxiliary
/// instance: preprocess, classify, round, solve, lift, and restore the
/// removed jobs.
pub fn solve_with_rounded_solver<F>(instance: &Instance, delta: Delta, solve: F) -> Result<Schedule>
where
    F: FnOnce(&RoundedInstance) -> Result<RoundedSchedule>,
{
    let pre = preprocess(instance)?;
    if let Some(schedule) = pre.fast_path {
        return Ok(schedule);
    }
    let core = pre
        .core
        .as_ref()
        .ok_or_else(|| contract("preprocessing left machines without a core"))?;
    let classification = classify(core, delta)?;
    let rounded = build_auxiliary(core, &classification, delta);
    let rounded_schedule = solve(&rounded)?;
    let lifted = lift_solution(core, &classification, delta, &rounded_schedule)?;
    pre.lift(instance, &lifted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(jobs: &[Time], m: usize, d: Time) -> Instance {
        Instance::new(jobs.to_vec(), m, d).unwrap()
    }

    #[test]
    fn delta_from_epsilon() {
        assert_eq!(Delta::from_epsilon(Ratio::new(1, 2)).unwrap().q(), 20);
        assert_eq!(Delta::from_epsilon(Ratio::new(1, 3)).unwrap().q(), 30);
        assert_eq!(Delta::from_epsilon(Ratio::new(999, 1000)).unwrap().q(), 11);
        assert!(Delta::from_epsilon(Ratio::new(0, 1)).is_err());
        assert!(Delta::from_epsilon(Ratio::new(1, 1)).is_err());
        assert!(Delta::from_epsilon(Ratio::new(3, 2)).is_err());
    }

    #[test]
    fn delta_parsing() {
        assert_eq!("1/3".parse::<Delta>().unwrap().q(), 3);
        assert_eq!("2/8".parse::<Delta>().unwrap().q(), 4);
        assert!("2/3".parse::<Delta>().is_err());
        assert!("1/1".parse::<Delta>().is_err());
        assert!("x".parse::<Delta>().is_err());
        assert_eq!(Delta::new(7).unwrap().to_string(), "1/7");
    }

    #[test]
    fn class_count_matches_formula() {
        for q in 2..12u64 {
            let delta = Delta::new(q).unwrap();
            // (1−δ)/δ² with δ = 1/q
            let k =
                (Ratio::from_integer(1) - delta.as_ratio()) / (delta.as_ratio() * delta.as_ratio());
            assert_eq!(k, Ratio::from_integer(delta.class_count() as u64));
        }
    }

    #[test]
    fn classify_interval_examples() {
        let delta = Delta::new(10).unwrap();
        assert_eq!(class_of(9, 100, delta), 0);
        assert_eq!(class_of(10, 100, delta), 1);
        assert_eq!(class_of(37, 100, delta), 28);
        assert_eq!(class_of(99, 100, delta), 90);

        let c = classify(&inst(&[3, 3, 2, 1], 2, 4), Delta::new(2).unwrap()).unwrap();
        assert_eq!(c.small_jobs, vec![3]);
        assert_eq!(c.class_of, vec![2, 2, 1, 0]);
        assert_eq!(c.class_counts, vec![1, 1, 2]);
    }

    #[test]
    fn classify_all_small() {
        let c = classify(&inst(&[1, 2, 3, 4], 3, 50), Delta::new(10).unwrap()).unwrap();
        assert_eq!(c.small_jobs.len(), 4);
        assert!(c.class_counts[1..].iter().all(|&n| n == 0));
    }

    #[test]
    fn classify_requires_short_jobs() {
        let err = classify(&inst(&[4, 1], 2, 4), Delta::new(2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)));
    }

    #[test]
    fn auxiliary_small_example() {
        let i = inst(&[3, 3, 2, 1], 2, 4);
        let delta = Delta::new(2).unwrap();
        let r = build_auxiliary(&i, &classify(&i, delta).unwrap(), delta);
        assert_eq!(r.units_per_due_date(), 4);
        assert_eq!(r.small_count, 0);
        let sizes: Vec<(usize, u64)> = r.big_jobs.iter().map(|b| (b.job, b.size_units)).collect();
        assert_eq!(sizes, vec![(0, 3), (1, 3), (2, 2)]);
        assert_eq!(r.capacities, vec![0, 1, 2]);
    }

    #[test]
    fn auxiliary_small_blocks_floor() {
        let i = inst(&[9, 9, 9, 7, 37], 2, 100);
        let delta = Delta::new(10).unwrap();
        let r = build_auxiliary(&i, &classify(&i, delta).unwrap(), delta);
        assert_eq!(r.small_count, 3);
        assert_eq!(r.small_size_units(), 10);
        assert_eq!(r.big_jobs[0].size_units, 37);
        assert_eq!(r.units_in_time(37), Ratio::from_integer(37));
    }

    #[test]
    fn lift_worked_example() {
        let i = inst(&[3, 3, 2, 1], 2, 4);
        let delta = Delta::new(2).unwrap();
        let c = classify(&i, delta).unwrap();
        let r = build_auxiliary(&i, &c, delta);
        let rs = RoundedSchedule::new(&r, vec![0, 0], vec![vec![0, 2], vec![1]]).unwrap();
        assert_eq!(rs.value_units, 7);
        let s = lift_solution(&i, &c, delta, &rs).unwrap();
        assert_eq!(s.assignment, vec![0, 1, 0, 1]);
        assert_eq!(s.machine_loads, vec![5, 4]);
        assert_eq!(s.early_work_total, 8);
    }

    #[test]
    fn lift_only_small_jobs() {
        let i = inst(&[1, 1, 1, 1, 1], 2, 10);
        let delta = Delta::new(2).unwrap();
        let c = classify(&i, delta).unwrap();
        let r = build_auxiliary(&i, &c, delta);
        let rs = RoundedSchedule::new(&r, vec![0, 0], vec![vec![], vec![]]).unwrap();
        let s = lift_solution(&i, &c, delta, &rs).unwrap();
        assert_eq!(s.assignment, vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn lift_deals_small_jobs_against_threshold() {
        // q = 2, d = 20: blocks of 10, small jobs < 10
        let i = inst(&[4, 4, 4, 4, 4, 4], 2, 20);
        let delta = Delta::new(2).unwrap();
        let c = classify(&i, delta).unwrap();
        let r = build_auxiliary(&i, &c, delta);
        assert_eq!(r.small_count, 2);
        // machine 0 holds both blocks: takes jobs until load > 10
        let rs = RoundedSchedule::new(&r, vec![2, 0], vec![vec![], vec![]]).unwrap();
        let s = lift_solution(&i, &c, delta, &rs).unwrap();
        assert_eq!(&s.assignment[..3], &[0, 0, 0]);
        // one block each: each machine takes a single job, the rest balance
        let rs = RoundedSchedule::new(&r, vec![1, 1], vec![vec![], vec![]]).unwrap();
        let s = lift_solution(&i, &c, delta, &rs).unwrap();
        assert_eq!(&s.assignment[..2], &[0, 1]);
        assert_eq!(s.machine_loads, vec![12, 12]);
    }

    #[test]
    fn lift_without_small_jobs_keeps_machine_map() {
        let i = inst(&[3, 2, 3], 2, 4);
        let delta = Delta::new(2).unwrap();
        let c = classify(&i, delta).unwrap();
        let r = build_auxiliary(&i, &c, delta);
        let rs = RoundedSchedule::new(&r, vec![0, 0], vec![vec![1], vec![0, 2]]).unwrap();
        let s = lift_solution(&i, &c, delta, &rs).unwrap();
        assert_eq!(s.assignment, vec![1, 0, 1]);
    }

    #[test]
    fn rounded_schedule_validation() {
        let i = inst(&[3, 3, 2, 1], 2, 4);
        let delta = Delta::new(2).unwrap();
        let c = classify(&i, delta).unwrap();
        let r = build_auxiliary(&i, &c, delta);
        assert!(RoundedSchedule::new(&r, vec![0, 0], vec![vec![3], vec![]]).is_err());
        assert!(RoundedSchedule::new(&r, vec![0, 0], vec![vec![0], vec![0]]).is_err());
        assert!(RoundedSchedule::new(&r, vec![1, 0], vec![vec![], vec![]]).is_err());
        assert!(RoundedSchedule::new(&r, vec![0], vec![vec![]]).is_err());

        let forged = RoundedSchedule {
            small_counts: vec![0, 0],
            big_jobs: vec![vec![3], vec![]],
            load_units: vec![2, 0],
            value_units: 2,
        };
        assert!(lift_solution(&i, &c, delta, &forged).is_err());
    }
}
