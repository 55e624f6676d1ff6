//! Approximation algorithms for γ-colorful supplier clustering.
//!
//! Clients carry γ nonnegative integer weight functions ("colors"). A solution
//! opens a facility set S from a down-closed family (a knapsack or a linear
//! matroid) and a radius r such that, in every color, the clients within r of
//! S weigh at least the color's requirement.
//!
//! Two solvers are provided:
//!
//! * [`reduction::solve_via_reduction`] builds an (L, r)-partition of the
//!   clients and solves the resulting cover-promise problem, giving radius
//!   at most (10(2^γ − 1) + 1)·OPT for knapsack and linear-matroid constraints.
//! * [`knapsack7::solve_knapsack7`] is the guess-and-round 7-approximation for
//!   knapsack constraints.
//!
//! [`harness`] holds brute-force oracles and instance generators used to test
//! every guarantee at small scale.

pub mod error;
pub mod fcp;
pub mod harness;
pub mod io;
pub mod knapsack7;
pub mod linmat;
pub mod lp;
pub mod matching;
pub mod model;
pub mod partition;
pub mod reduction;
pub mod report;
pub mod seed;

pub use error::{Error, Result};
pub use model::{
    check_solution, coverage, normalize_and_validate, radius_candidates, radius_schedule,
    ColorfulSpace, FacilityConstraint, SupplierInstance, SupplierSolution, ValidateOptions,
};
