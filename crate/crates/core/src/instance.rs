//! Problem data, objective evaluation and the preprocessing that every
//! approximation scheme in this crate starts from.
//!
//! The objective of a schedule is the total early work
//! `X = Σ_i min(C_i, d)`, where `C_i` is the load of machine `i`. The
//! order of jobs within a machine changes how the early work splits among
//! individual jobs but never the total.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{contract, validation, Result};

/// Processing times and the due date share one abstract integer time unit.
pub type Time = u64;

/// Jobs, identical machines and the common due date.
///
/// Job identity is the position in [`Instance::jobs`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    jobs: Vec<Time>,
    machines: usize,
    due_date: Time,
}

impl Instance {
    pub fn new(jobs: Vec<Time>, machines: usize, due_date: Time) -> Result<Self> {
        if machines == 0 {
            return Err(validation("machine count must be at least 1"));
        }
        if due_date == 0 {
            return Err(validation("due date must be at least 1"));
        }
        if let Some(j) = jobs.iter().position(|&p| p == 0) {
            return Err(validation(format!("job {j} has zero processing time")));
        }
        Ok(Self {
            jobs,
            machines,
            due_date,
        })
    }

    pub fn jobs(&self) -> &[Time] {
        &self.jobs
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn machine_count(&self) -> usize {
        self.machines
    }

    pub fn due_date(&self) -> Time {
        self.due_date
    }

    pub fn total_processing(&self) -> Time {
        self.jobs.iter().sum()
    }

    /// `min(m·d, p(J))`, which no schedule can exceed.
    pub fn trivial_upper_bound(&self) -> Time {
        (self.machines as Time * self.due_date).min(self.total_processing())
    }

    /// Every job is shorter than the due date.
    pub fn all_jobs_short(&self) -> bool {
        self.jobs.iter().all(|&p| p < self.due_date)
    }

    /// `p(J) ≤ 2·m·d`.
    pub fn total_within_twice_capacity(&self) -> bool {
        self.total_processing() <= 2 * self.machines as Time * self.due_date
    }
}

/// A complete assignment of jobs to machines together with its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// `assignment[j]` is the machine processing job `j`.
    pub assignment: Vec<usize>,
    pub machine_loads: Vec<Time>,
    pub early_work_total: Time,
    /// Early work of each job when every machine processes its jobs in
    /// ascending job-index order.
    pub per_job_early_work: Vec<Time>,
}

impl Schedule {
    pub fn machine_count(&self) -> usize {
        self.machine_loads.len()
    }

    pub fn max_load(&self) -> Time {
        self.machine_loads.iter().copied().max().unwrap_or(0)
    }

    pub fn min_load(&self) -> Time {
        self.machine_loads.iter().copied().min().unwrap_or(0)
    }

    /// Jobs of machine `i` in ascending index order.
    pub fn jobs_on(&self, machine: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &i)| i == machine)
            .map(|(j, _)| j)
            .collect()
    }
}

/// `Σ_i min(C_i, d)`.
pub fn early_work_of_loads(loads: &[Time], due_date: Time) -> Time {
    loads.iter().map(|&c| c.min(due_date)).sum()
}

/// Per-job early work for an explicit processing order on each machine.
///
/// `X_j = min(p_j, max(0, d − S_j))` with `S_j` the start time of job `j`.
pub fn early_work_in_order(instance: &Instance, machine_orders: &[Vec<usize>]) -> Vec<Time> {
    let d = instance.due_date();
    let mut early = vec![0; instance.job_count()];
    for order in machine_orders {
        let mut start: Time = 0;
        for &j in order {
            let p = instance.jobs()[j];
            early[j] = p.min(d.saturating_sub(start));
            start += p;
        }
    }
    early
}

/// Evaluates a job-to-machine assignment (`assignment[j]` = machine of job `j`).
pub fn evaluate(instance: &Instance, assignment: &[usize]) -> Result<Schedule> {
    if assignment.len() != instance.job_count() {
        return Err(validation(format!(
            "assignment covers {} jobs, instance has {}",
            assignment.len(),
            instance.job_count()
        )));
    }
    let m = instance.machine_count();
    let d = instance.due_date();
    let mut loads = vec![0; m];
    let mut early = Vec::with_capacity(assignment.len());
    for (j, (&i, &p)) in assignment.iter().zip(instance.jobs()).enumerate() {
        if i >= m {
            return Err(validation(format!(
                "job {j} assigned to machine {i}, only {m} machines"
            )));
        }
        early.push(p.min(d.saturating_sub(loads[i])));
        loads[i] += p;
    }
    Ok(Schedule {
        assignment: assignment.to_vec(),
        early_work_total: early_work_of_loads(&loads, d),
        machine_loads: loads,
        per_job_early_work: early,
    })
}

/// Converts `(job, machine)` pairs into a dense assignment, rejecting
/// missing and duplicated job indices.
pub fn assignment_from_pairs(job_count: usize, pairs: &[(usize, usize)]) -> Result<Vec<usize>> {
    let mut assignment = vec![None; job_count];
    for &(j, i) in pairs {
        let slot = assignment
            .get_mut(j)
            .ok_or_else(|| validation(format!("unknown job index {j}")))?;
        if slot.replace(i).is_some() {
            return Err(validation(format!("job {j} assigned twice")));
        }
    }
    assignment
        .into_iter()
        .enumerate()
        .map(|(j, i)| i.ok_or_else(|| validation(format!("job {j} is not assigned"))))
        .collect()
}

/// Outcome of [`preprocess`].
///
/// Jobs with `p_j ≥ d` each occupy a dedicated machine and earn exactly
/// `d`. They are removed together with their machines; the `t`-th removed
/// job (ascending index) keeps original machine `t`, and core machine `c`
/// is original machine `removed_jobs.len() + c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessResult {
    /// Remaining instance, absent only when no machine remains.
    pub core: Option<Instance>,
    /// Original index of each core job.
    pub core_jobs: Vec<usize>,
    /// `(job, dedicated machine)` for each removed job.
    pub removed_jobs: Vec<(usize, usize)>,
    /// Optimal schedule on the original instance, when preprocessing
    /// already settles the problem.
    pub fast_path: Option<Schedule>,
}

impl PreprocessResult {
    pub fn fast_path_value(&self) -> Option<Time> {
        self.fast_path.as_ref().map(|s| s.early_work_total)
    }

    /// Core instance when no fast path applies; it then satisfies
    /// `p_j < d` for all jobs, `p(J) ≤ 2·m·d` and `2·OPT ≥ m·d`.
    pub fn reduced_core(&self) -> Option<&Instance> {
        match self.fast_path {
            Some(_) => None,
            None => self.core.as_ref(),
        }
    }

    /// Maps a schedule of the core back onto the original instance.
    pub fn lift(&self, original: &Instance, core_schedule: &Schedule) -> Result<Schedule> {
        let core_machines = self.core.as_ref().map_or(0, Instance::machine_count);
        if core_schedule.assignment.len() != self.core_jobs.len() {
            return Err(contract("core schedule does not match the core instance"));
        }
        let offset = self.removed_jobs.len();
        let mut assignment = vec![0; original.job_count()];
        for &(j, i) in &self.removed_jobs {
            assignment[j] = i;
        }
        for (&j, &i) in self.core_jobs.iter().zip(&core_schedule.assignment) {
            if i >= core_machines {
                return Err(contract("core schedule uses an unknown machine"));
            }
            assignment[j] = offset + i;
        }
        evaluate(original, &assignment)
    }
}

/// Removes jobs that reach the due date on their own and settles the cases
/// that need no approximation: the oversupplied case `p(J) > 2·m·d`, solved
/// optimally by a greedy fill, and the case where LPT finishes every machine
/// by the due date.
///
/// Without a fast path the core satisfies `p_j < d`, `p(J) ≤ 2·m·d` and
/// `m·d/2 ≤ OPT ≤ m·d`.
pub fn preprocess(instance: &Instance) -> Result<PreprocessResult> {
    let m = instance.machine_count();
    let d = instance.due_date();
    let removed_jobs: Vec<(usize, usize)> = instance
        .jobs()
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p >= d)
        .map(|(j, _)| j)
        .take(m)
        .enumerate()
        .map(|(machine, j)| (j, machine))
        .collect();
    let r = removed_jobs.len();
    let mut is_removed = vec![false; instance.job_count()];
    for &(j, _) in &removed_jobs {
        is_removed[j] = true;
    }
    let core_jobs: Vec<usize> = (0..instance.job_count())
        .filter(|&j| !is_removed[j])
        .collect();
    let core_machines = m - r;

    let mut assignment = vec![0; instance.job_count()];
    for &(j, i) in &removed_jobs {
        assignment[j] = i;
    }

    if core_machines == 0 {
        // Surplus jobs earn nothing wherever they go.
        return Ok(PreprocessResult {
            core: None,
            core_jobs,
            removed_jobs,
            fast_path: Some(evaluate(instance, &assignment)?),
        });
    }

    let core_times: Vec<Time> = core_jobs.iter().map(|&j| instance.jobs()[j]).collect();
    let core = Instance::new(core_times, core_machines, d)?;
    let fast_path = if core.job_count() == 0 {
        Some(evaluate(instance, &assignment)?)
    } else if !core.total_within_twice_capacity() {
        let mut machine = 0;
        let mut load = 0;
        for &j in &core_jobs {
            assignment[j] = r + machine;
            load += instance.jobs()[j];
            if load > d && machine + 1 < core_machines {
                machine += 1;
                load = 0;
            }
        }
        Some(evaluate(instance, &assignment)?)
    } else {
        // LPT either finishes every machine by d (then it is optimal) or
        // loads every machine to at least d/2, which gives OPT ≥ m·d/2.
        let schedule = lpt(&core);
        if schedule.max_load() <= d {
            for (&j, &i) in core_jobs.iter().zip(&schedule.assignment) {
                assignment[j] = r + i;
            }
            Some(evaluate(instance, &assignment)?)
        } else {
            None
        }
    };

    Ok(PreprocessResult {
        core: Some(core),
        core_jobs,
        removed_jobs,
        fast_path,
    })
}

/// Longest processing time first: jobs by non-increasing size (ties by
/// index), each onto the currently least-loaded machine (ties by index).
pub fn lpt(instance: &Instance) -> Schedule {
    let mut order: Vec<usize> = (0..instance.job_count()).collect();
    order.sort_by_key(|&j| (Reverse(instance.jobs()[j]), j));
    let mut heap: BinaryHeap<Reverse<(Time, usize)>> = (0..instance.machine_count())
        .map(|i| Reverse((0, i)))
        .collect();
    let mut assignment = vec![0; instance.job_count()];
    for j in order {
        let Reverse((load, i)) = heap.pop().expect("at least one machine");
        assignment[j] = i;
        heap.push(Reverse((load + instance.jobs()[j], i)));
    }
    evaluate(instance, &assignment).expect("LPT assignment is complete")
}

/// The two cases of the LPT argument on instances with `p_j < d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LptCase {
    /// Every machine finishes by the due date; the schedule is optimal.
    AllEarly,
    /// Every machine is loaded to at least `d/2`, hence `OPT ≥ m·d/2`.
    HalfLoaded,
    /// Neither holds. Impossible for an LPT schedule of short jobs.
    Neither,
}

impl LptCase {
    pub fn of(schedule: &Schedule, due_date: Time) -> Self {
        if schedule.max_load() <= due_date {
            LptCase::AllEarly
        } else if 2 * schedule.min_load() >= due_date {
            LptCase::HalfLoaded
        } else {
            LptCase::Neither
        }
    }
}

/// Moves jobs off machines loaded beyond `3d` until none remain, never
/// decreasing the total early work.
///
/// Repeatedly takes the highest-index job of the lowest-index overloaded
/// machine and puts it on the lowest-index machine with load at most `2d`.
/// A receiving machine ends below `3d`, so every job moves at most once.
pub fn normalize_loads(instance: &Instance, schedule: &Schedule) -> Result<Schedule> {
    let d = instance.due_date();
    let mut assignment = schedule.assignment.clone();
    let mut loads = schedule.machine_loads.clone();
    let mut per_machine: Vec<Vec<usize>> = vec![Vec::new(); loads.len()];
    for (j, &i) in assignment.iter().enumerate() {
        per_machine[i].push(j);
    }
    while let Some(src) = loads.iter().position(|&c| c > 3 * d) {
        let dst = loads.iter().position(|&c| c <= 2 * d).ok_or_else(|| {
            contract("a machine exceeds 3d but none is at most 2d; preprocessing was skipped")
        })?;
        let j = per_machine[src]
            .pop()
            .expect("overloaded machine has a job");
        let p = instance.jobs()[j];
        loads[src] -= p;
        loads[dst] += p;
        assignment[j] = dst;
        // Keep ascending order so the next pop yields the highest index.
        let pos = per_machine[dst].partition_point(|&k| k < j);
        per_machine[dst].insert(pos, j);
    }
    evaluate(instance, &assignment)
}
