//! Serializable solve reports shared by the CLI, bench runner and FFI.
//!
//! Reports carry no timing, so equal inputs give byte-identical JSON.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::oracle::brute_force_optimal;
use crate::knapsack7::{solve_knapsack7, Knapsack7Limits};
use crate::model::{covered_mask, SupplierInstance};
use crate::reduction::{solve_via_reduction, FcpSolverKind, ReductionOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Reduction,
    Knapsack7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub seed: u64,
    pub reps: u32,
    pub max_guesses: u64,
    /// Also compute the exact optimum radius.
    pub oracle: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            reps: ReductionOptions::default().reps,
            max_guesses: Knapsack7Limits::default().max_guesses,
            oracle: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub sigma: u64,
    pub tau: Vec<u64>,
    pub dense_clusters: usize,
    pub lp_fractionals: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub feasible: bool,
    pub radius: Option<u64>,
    pub radius_guess: Option<u64>,
    pub factor_bound: u64,
    /// Facility ids, sorted by index.
    pub centers: Vec<String>,
    pub covered: Vec<u64>,
    /// Original ids of covered clients, deduplicated in first-seen order.
    pub covered_clients: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_radius: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guesses_tried: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<PhaseReport>,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn solve_report(
    instance: &SupplierInstance,
    algorithm: Algorithm,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let space = &instance.space;
    let mut report = SolveReport {
        algorithm,
        feasible: false,
        radius: None,
        radius_guess: None,
        factor_bound: 0,
        centers: Vec::new(),
        covered: vec![0; instance.gamma()],
        covered_clients: Vec::new(),
        opt_radius: None,
        guesses_tried: None,
        phases: None,
    };
    let found = match algorithm {
        Algorithm::Reduction => {
            let kind = FcpSolverKind::for_constraint(&instance.constraint);
            report.factor_bound = crate::reduction::reduction_factor(instance.gamma());
            let ro = ReductionOptions {
                seed: opts.seed,
                reps: opts.reps,
            };
            solve_via_reduction(instance, kind, ro)?.map(|o| {
                report.radius_guess = Some(o.radius_guess);
                o.solution
            })
        }
        Algorithm::Knapsack7 => {
            report.factor_bound = crate::knapsack7::APPROX_FACTOR;
            let limits = Knapsack7Limits {
                max_guesses: opts.max_guesses,
            };
            let out = solve_knapsack7(instance, &limits)?;
            out.map(|o| {
                report.radius_guess = Some(o.radius_guess);
                report.guesses_tried = Some(o.guesses_tried);
                report.phases = Some(PhaseReport {
                    sigma: o.phases.sigma,
                    tau: o.phases.tau,
                    dense_clusters: o.phases.dense_clusters,
                    lp_fractionals: o.phases.lp_fractionals,
                });
                o.solution
            })
        }
    };
    if let Some(sol) = found {
        let mask = covered_mask(space, &sol.centers, sol.radius)?;
        let mut seen = std::collections::BTreeSet::new();
        for c in (0..space.n_clients()).filter(|&c| mask[c]) {
            let origin = space.origin_of(c);
            if seen.insert(origin.to_string()) {
                report.covered_clients.push(origin.to_string());
            }
        }
        report.feasible = sol.feasible;
        report.radius = Some(sol.radius);
        report.centers = sol
            .centers
            .iter()
            .map(|&f| space.facility_id(f).to_string())
            .collect();
        report.covered = sol.covered;
    }
    if opts.oracle {
        report.opt_radius = brute_force_optimal(instance)?.map(|o| o.radius);
    }
    Ok(report)
}
