//! Fixed-`m` scheme: the capacity dynamic program run on the auxiliary
//! instance.
//!
//! Every auxiliary job is an integer number of grid units and the due date
//! is `q²` units, so the program over remaining capacities `0..=q²` solves
//! the auxiliary instance exactly. Small blocks come first in the job
//! order, then big jobs by ascending original index.

use crate::dp::DpTable;
use crate::error::Result;
use crate::instance::{Instance, Schedule};
use crate::rounding::{solve_with_rounded_solver, Delta, RoundedInstance, RoundedSchedule};

/// Default cap on cells across all layers of the table.
pub const DEFAULT_MAX_CELLS: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FptasOptions {
    pub max_cells: u64,
}

impl Default for FptasOptions {
    fn default() -> Self {
        Self {
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

/// Builds the full table for the auxiliary instance; exposed for inspection.
pub fn rounded_table(rounded: &RoundedInstance, options: &FptasOptions) -> Result<DpTable> {
    DpTable::build(
        &rounded.job_sizes_units(),
        rounded.machines,
        rounded.units_per_due_date(),
        options.max_cells,
    )
}

/// Optimal value of the auxiliary instance in grid units and a schedule
/// attaining it.
pub fn dp_solve_rounded(rounded: &RoundedInstance) -> Result<(u64, RoundedSchedule)> {
    dp_solve_rounded_with(rounded, &FptasOptions::default())
}

pub fn dp_solve_rounded_with(
    rounded: &RoundedInstance,
    options: &FptasOptions,
) -> Result<(u64, RoundedSchedule)> {
    let table = rounded_table(rounded, options)?;
    let schedule = RoundedSchedule::from_item_assignment(rounded, &table.backtrack())?;
    debug_assert_eq!(schedule.value_units, table.optimum());
    Ok((table.optimum(), schedule))
}

pub fn solve_fptas(instance: &Instance, delta: Delta) -> Result<Schedule> {
    solve_fptas_with(instance, delta, &FptasOptions::default())
}

pub fn solve_fptas_with(
    instance: &Instance,
    delta: Delta,
    options: &FptasOptions,
) -> Result<Schedule> {
    solve_with_rounded_solver(instance, delta, |rounded| {
        dp_solve_rounded_with(rounded, options).map(|(_, s)| s)
    })
}
