//! Exact solvers for small instances, used as ground truth.
//!
//! [`brute_force`] enumerates every assignment; [`exact_dp`] runs the
//! capacity recurrence on the integer grid `0..=d`. They share no code.

use crate::dp::DpTable;
use crate::error::{resource, Result};
use crate::instance::{evaluate, Instance, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    /// Cap on `m^n`.
    pub max_assignments: u64,
    /// Cap on `(n+1)·(d+1)^m` table cells.
    pub max_states: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_assignments: 50_000_000,
            max_states: 20_000_000,
        }
    }
}

/// Maximum early work over all `m^n` assignments, with the lexicographically
/// smallest maximizing assignment.
pub fn brute_force(instance: &Instance, budget: &OracleBudget) -> Result<(u64, Schedule)> {
    let n = instance.job_count();
    let m = instance.machine_count();
    let d = instance.due_date();
    let total = (m as u64)
        .checked_pow(n as u32)
        .filter(|&t| t <= budget.max_assignments)
        .ok_or_else(|| {
            resource(format!(
                "brute force over {m}^{n} assignments exceeds {}",
                budget.max_assignments
            ))
        })?;

    let jobs = instance.jobs();
    let mut assignment = vec![0usize; n];
    let mut loads = vec![0u64; m];
    loads[0] = instance.total_processing();
    let value = |loads: &[u64]| loads.iter().map(|&c| c.min(d)).sum::<u64>();
    let mut best = value(&loads);
    let mut best_assignment = assignment.clone();
    // Odometer over assignments in lexicographic order, last job fastest.
    for _ in 1..total {
        let mut pos = n;
        loop {
            pos -= 1;
            let j = pos;
            loads[assignment[j]] -= jobs[j];
            if assignment[j] + 1 < m {
                assignment[j] += 1;
                loads[assignment[j]] += jobs[j];
                break;
            }
            assignment[j] = 0;
            loads[0] += jobs[j];
        }
        let v = value(&loads);
        if v > best {
            best = v;
            best_assignment.copy_from_slice(&assignment);
        }
    }
    Ok((best, evaluate(instance, &best_assignment)?))
}

/// Exact optimum through the capacity recurrence on `0..=d`.
pub fn exact_dp(instance: &Instance, budget: &OracleBudget) -> Result<(u64, Schedule)> {
    let table = DpTable::build(
        instance.jobs(),
        instance.machine_count(),
        instance.due_date(),
        budget.max_states,
    )?;
    let schedule = evaluate(instance, &table.backtrack())?;
    Ok((table.optimum(), schedule))
}
