//! Seeded instance generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::instance::{Instance, Time};
use crate::rounding::Delta;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    /// Processing times uniform in `[1, d−1]`.
    Uniform,
    /// Processing times within one unit of a class boundary
    /// `d/q + k·d/q²`, `k = 0..=K`, for the given `q`.
    Boundary { q: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub m: usize,
    pub d: Time,
    pub distribution: Distribution,
    pub seed: u64,
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    if spec.d < 2 {
        return Err(validation("generated instances need d ≥ 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.d;
    let jobs: Vec<Time> = match spec.distribution {
        Distribution::Uniform => (0..spec.n).map(|_| rng.gen_range(1..d)).collect(),
        Distribution::Boundary { q } => {
            let delta = Delta::new(q)?;
            let classes = delta.class_count() as u64;
            let units = delta.units_per_due_date() as u128;
            (0..spec.n)
                .map(|_| {
                    let k = rng.gen_range(0..=classes);
                    let boundary = (d as u128 * (q + k) as u128 / units) as i64;
                    let p = boundary + rng.gen_range(-1i64..=1);
                    p.clamp(1, d as i64 - 1) as Time
                })
                .collect()
        }
    };
    Instance::new(jobs, spec.m, spec.d)
}
