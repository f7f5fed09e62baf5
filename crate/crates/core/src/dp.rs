//! Dynamic program over remaining early capacity.
//!
//! `f(j, E_1, …, E_m)` is the largest early work the first `j` jobs can
//! collect when machine `i` still has `E_i` time units before the due date:
//!
//! ```text
//! f(j, E) = max_i  f(j−1, E with E_i ← max(0, E_i − p_j)) + min(p_j, E_i)
//! ```
//!
//! Coordinates range over every integer in `0..=cap`, which is closed under
//! the update for integer job lengths. The optimum is `f(n, cap, …, cap)`.

use crate::error::{resource, Result};

#[derive(Debug, Clone)]
pub struct DpTable {
    sizes: Vec<u64>,
    machines: usize,
    cap: u64,
    strides: Vec<usize>,
    layers: Vec<Vec<u64>>,
}

impl DpTable {
    /// Number of cells a table for `jobs` jobs would hold, or `None` on overflow.
    pub fn cell_count(jobs: usize, machines: usize, cap: u64) -> Option<u64> {
        let side = cap.checked_add(1)?;
        let per_layer = (0..machines).try_fold(1u64, |acc, _| acc.checked_mul(side))?;
        per_layer.checked_mul(jobs as u64 + 1)
    }

    pub fn build(sizes: &[u64], machines: usize, cap: u64, max_cells: u64) -> Result<Self> {
        let cells = Self::cell_count(sizes.len(), machines, cap);
        match cells {
            Some(c) if c <= max_cells => {}
            _ => {
                return Err(resource(format!(
                    "dynamic program needs {} cells (limit {max_cells}) for {} jobs, {machines} machines, \
                     grid 0..={cap}; use a coarser δ or the configuration solver",
                    cells.map_or("more than 2^64".to_string(), |c| c.to_string()),
                    sizes.len()
                )))
            }
        }
        let side = (cap + 1) as usize;
        let strides: Vec<usize> = (0..machines).map(|i| side.pow(i as u32)).collect();
        let per_layer = side.pow(machines as u32);

        let mut layers = Vec::with_capacity(sizes.len() + 1);
        layers.push(vec![0u64; per_layer]);
        for &p in sizes {
            let prev = layers.last().expect("initial layer");
            let mut next = vec![0u64; per_layer];
            for (idx, cell) in next.iter_mut().enumerate() {
                let mut best = 0;
                for &stride in &strides {
                    let e = ((idx / stride) % side) as u64;
                    let used = p.min(e);
                    let candidate = prev[idx - used as usize * stride] + used;
                    best = best.max(candidate);
                }
                *cell = best;
            }
            layers.push(next);
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            machines,
            cap,
            strides,
            layers,
        })
    }

    fn index(&self, remaining: &[u64]) -> usize {
        assert_eq!(remaining.len(), self.machines);
        remaining
            .iter()
            .zip(&self.strides)
            .map(|(&e, &s)| {
                assert!(e <= self.cap, "coordinate {e} beyond grid");
                e as usize * s
            })
            .sum()
    }

    /// `f(jobs, remaining)`.
    pub fn value(&self, jobs: usize, remaining: &[u64]) -> u64 {
        self.layers[jobs][self.index(remaining)]
    }

    pub fn optimum(&self) -> u64 {
        *self.layers[self.sizes.len()].last().unwrap_or(&0)
    }

    pub fn job_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn cells_per_layer(&self) -> usize {
        self.layers[0].len()
    }

    /// Machine receiving each job in an optimal solution; ties go to the
    /// lowest machine index.
    pub fn backtrack(&self) -> Vec<usize> {
        let mut remaining = vec![self.cap; self.machines];
        let mut machine_of = vec![0; self.sizes.len()];
        for j in (1..=self.sizes.len()).rev() {
            let p = self.sizes[j - 1];
            let target = self.value(j, &remaining);
            let i = (0..self.machines)
                .find(|&i| {
                    let used = p.min(remaining[i]);
                    let mut before = remaining.clone();
                    before[i] -= used;
                    self.value(j - 1, &before) + used == target
                })
                .expect("some machine attains the recurrence maximum");
            remaining[i] -= p.min(remaining[i]);
            machine_of[j - 1] = i;
        }
        machine_of
    }
}
