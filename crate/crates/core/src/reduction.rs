//! Supplier solutions through (L, r)-partitions and cover-promise solvers.
//!
//! For each radius guess r, the clients are partitioned into parts of
//! diameter at most L·r, each facility becomes the set of parts within r, and
//! the cover-promise solver picks a feasible family. Every client of a chosen
//! part lies within (L + 1)·r of its facility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcp::{build_fcp, solve_fcp_knapsack};
use crate::linmat::solve_fcp_linear_matroid;
use crate::model::{
    check_solution, radius_schedule, FacilityConstraint, SupplierInstance, SupplierSolution,
};
use crate::partition::{build_partition, partition_factor};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FcpSolverKind {
    Knapsack,
    LinearMatroid,
}

impl FcpSolverKind {
    pub fn for_constraint(c: &FacilityConstraint) -> Self {
        match c {
            FacilityConstraint::Knapsack { .. } => FcpSolverKind::Knapsack,
            FacilityConstraint::LinearMatroid { .. } => FcpSolverKind::LinearMatroid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionOptions {
    pub seed: u64,
    /// Base repetitions of each randomized exact-weight decision.
    pub reps: u32,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self { seed: 0, reps: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionOutcome {
    pub solution: SupplierSolution,
    /// The radius guess r; the solution radius is (L + 1)·r.
    pub radius_guess: u64,
    pub l_factor: u64,
    pub factor_bound: u64,
    pub n_parts: usize,
    /// Radius guesses tried before (and including) the successful one.
    pub radii_tried: usize,
}

/// L + 1 = 10(2^γ − 1) + 1.
pub fn reduction_factor(gamma: usize) -> u64 {
    partition_factor(gamma) + 1
}

/// Smallest radius guess whose cover-promise instance is solved, assembled
/// into a supplier solution at radius (L + 1)·r. `None` when every guess fails.
pub fn solve_via_reduction(
    instance: &SupplierInstance,
    kind: FcpSolverKind,
    opts: ReductionOptions,
) -> Result<Option<ReductionOutcome>> {
    if FcpSolverKind::for_constraint(&instance.constraint) != kind {
        return Err(Error::ConstraintMismatch(match kind {
            FcpSolverKind::Knapsack => "knapsack solver on a non-knapsack instance",
            FcpSolverKind::LinearMatroid => "linear-matroid solver on a non-matroid instance",
        }));
    }
    let space = &instance.space;
    let radii = radius_schedule(space);
    // spread the failure budget over all radius guesses
    let extra = usize::BITS - radii.len().saturating_sub(1).leading_zeros();
    let reps = opts.reps + extra;
    for (i, &r) in radii.iter().enumerate() {
        let partition = build_partition(space, r);
        let fcp = build_fcp(
            space,
            &partition,
            r,
            &instance.requirements,
            &instance.constraint,
        );
        let found = match kind {
            FcpSolverKind::Knapsack => solve_fcp_knapsack(&fcp)?,
            FcpSolverKind::LinearMatroid => {
                solve_fcp_linear_matroid(&fcp, seed::derive(opts.seed, &[r]), reps)?
            }
        };
        let Some(found) = found else { continue };
        let l = partition.l_factor;
        let radius = (l + 1).saturating_mul(r);
        let solution = check_solution(instance, &found.sets, radius)?;
        if !solution.feasible {
            return Err(Error::Internal(format!(
                "assembled solution at radius {radius} is infeasible"
            )));
        }
        return Ok(Some(ReductionOutcome {
            solution,
            radius_guess: r,
            l_factor: l,
            factor_bound: reduction_factor(space.gamma()),
            n_parts: partition.len(),
            radii_tried: i + 1,
        }));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::tiny1_knapsack;

    #[test]
    fn tiny1_knapsack_pipeline() {
        let out = solve_via_reduction(
            &tiny1_knapsack(),
            FcpSolverKind::Knapsack,
            ReductionOptions::default(),
        )
        .unwrap()
        .unwrap();
        assert_eq!(out.solution.centers, vec![0]);
        assert_eq!(out.radius_guess, 1);
        assert!(out.solution.radius <= 11);
        assert_eq!(out.factor_bound, 11);
    }

    #[test]
    fn zero_requirements_open_nothing() {
        let mut inst = tiny1_knapsack();
        inst.requirements = vec![0];
        let out = solve_via_reduction(&inst, FcpSolverKind::Knapsack, ReductionOptions::default())
            .unwrap()
            .unwrap();
        assert!(out.solution.centers.is_empty());
        assert_eq!(out.radius_guess, 0);
    }

    #[test]
    fn factor_constants() {
        assert_eq!(reduction_factor(1), 11);
        assert_eq!(reduction_factor(2), 31);
    }

    #[test]
    fn mismatched_solver_rejected() {
        assert!(matches!(
            solve_via_reduction(
                &tiny1_knapsack(),
                FcpSolverKind::LinearMatroid,
                ReductionOptions::default()
            ),
            Err(Error::ConstraintMismatch(_))
        ));
    }

    #[test]
    fn matroid_pipeline_on_tiny1() {
        let mut inst = tiny1_knapsack();
        inst.constraint = FacilityConstraint::LinearMatroid {
            prime: 10_007,
            columns: vec![vec![1, 1], vec![2, 2]],
        };
        let out = solve_via_reduction(
            &inst,
            FcpSolverKind::LinearMatroid,
            ReductionOptions::default(),
        )
        .unwrap()
        .unwrap();
        assert_eq!(out.solution.centers, vec![0]);
        assert_eq!(out.radius_guess, 1);
    }

    #[test]
    fn unsatisfiable_requirement() {
        let mut inst = tiny1_knapsack();
        inst.requirements = vec![4];
        assert_eq!(
            solve_via_reduction(&inst, FcpSolverKind::Knapsack, ReductionOptions::default())
                .unwrap(),
            None
        );
    }
}
