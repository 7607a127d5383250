//! Test support, enabled with the `testkit` feature: a naive reference
//! evaluator with a random workload generator, answer perturbations, and
//! loaders for the fixture bank shipped in `fixtures/`.

pub mod fixtures;
pub mod oracle;
pub mod perturb;

pub use fixtures::{
    fixture_dir, load_bank, load_bank_specs, load_blind_cases, load_near_misses, BlindCase,
    NearMiss,
};
pub use oracle::{Workload, WorkloadGen};
pub use perturb::{near_miss, perturb};
