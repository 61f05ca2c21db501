//! Seeded Monte Carlo verification of error rates.
//!
//! Each replication draws k z statistics under the scenario's dependence
//! design, converts them to p values and runs individual, disjunction and
//! conjunction decisions on the same battery.

mod engine;
mod scenario;
mod seed;
mod wilson;

pub use engine::{
    sample_statistics, simulate, simulate_serial, simulate_with_threads, Estimates, JointRates,
    Rate,
};
pub use scenario::{Design, Scenario, DEFAULT_REPS, MAX_REPS};
pub use seed::{derive_rep_seed, splitmix64_mix, GOLDEN_GAMMA};
pub use wilson::wilson_ci;
