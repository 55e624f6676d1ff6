//! Exact oracles, instance generators and batch experiments.

pub mod bench;
pub mod generate;
pub mod oracle;
pub mod xwb_reduction;

pub use bench::{run_bench, write_csv, BenchConfig, BenchRow};
pub use generate::{generate_instance, random_xwb, ConstraintKind, GenParams, XwbInstance};
pub use oracle::{brute_force_optimal, min_radius_for, OptimalSolution, ORACLE_FACILITY_LIMIT};
pub use xwb_reduction::{xwb_to_colorful, DEFAULT_SEPARATION};
