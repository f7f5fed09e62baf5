//! Early-work maximization on identical parallel machines with a common
//! due date.
//!
//! Given jobs with integer processing times, `m` identical machines and a
//! due date `d`, find an assignment maximizing `Σ_i min(C_i, d)`. The crate
//! provides:
//!
//! * preprocessing, the LPT heuristic and load normalization ([`instance`]),
//! * rounding onto the `δ²d` grid and lifting back ([`rounding`]),
//! * an approximation scheme through an exactly solved configuration
//!   integer program ([`eptas`]),
//! * a fixed-`m` scheme through a capacity dynamic program ([`fptas`]),
//! * exact oracles for small instances ([`oracle`]),
//! * seeded generation and oracle-checked benchmarking ([`generate`],
//!   [`bench`]).
//!
//! ```
//! use earlywork::{solve_fptas, Delta, Instance};
//!
//! let instance = Instance::new(vec![3, 3, 2, 1], 2, 4).unwrap();
//! let schedule = solve_fptas(&instance, Delta::new(2).unwrap()).unwrap();
//! assert_eq!(schedule.early_work_total, 8);
//! ```

pub mod bench;
pub mod document;
pub mod dp;
pub mod eptas;
mod error;
pub mod fptas;
pub mod generate;
pub mod instance;
mod lp;
pub mod oracle;
pub mod rounding;

pub use eptas::{solve_eptas, solve_eptas_with, EptasOptions};
pub use error::{Error, Result};
pub use fptas::{solve_fptas, solve_fptas_with, FptasOptions};
pub use instance::{evaluate, lpt, normalize_loads, preprocess, Instance, Schedule, Time};
pub use oracle::{brute_force, exact_dp, OracleBudget};
pub use rounding::Delta;
