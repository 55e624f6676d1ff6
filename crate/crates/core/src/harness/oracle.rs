//! Exhaustive ground truth for small supplier instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{coverage, FacilityConstraint, SupplierInstance};

pub const ORACLE_FACILITY_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalSolution {
    pub centers: Vec<usize>,
    pub radius: u64,
    pub covered: Vec<u64>,
}

/// Smallest radius at which `centers` meets every requirement, or `None`.
/// The answer is always 0 or a client-facility distance.
pub fn min_radius_for(instance: &SupplierInstance, centers: &[usize]) -> Option<u64> {
    let space = &instance.space;
    let mut need = 0u64;
    for (l, &m) in instance.requirements.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let mut by_dist: Vec<(u64, u64)> = (0..space.n_clients())
            .filter_map(|c| {
                let d = centers.iter().map(|&f| space.client_facility(c, f)).min()?;
                Some((d, space.weight(c, l)))
            })
            .collect();
        by_dist.sort_unstable();
        let mut acc = 0u64;
        let reach = by_dist.iter().find_map(|&(d, w)| {
            acc += w;
            (acc >= m).then_some(d)
        })?;
        need = need.max(reach);
    }
    Some(need)
}

/// Optimal solution by enumeration of all constraint-feasible facility sets.
/// Ties are broken by (radius, size, sorted ids) lexicographically. `None`
/// when no feasible set meets the requirements at any radius.
pub fn brute_force_optimal(instance: &SupplierInstance) -> Result<Option<OptimalSolution>> {
    let nf = instance.space.n_facilities();
    if nf > ORACLE_FACILITY_LIMIT {
        return Err(Error::SizeLimitExceeded {
            what: "facilities for exhaustive search",
            size: nf,
            limit: ORACLE_FACILITY_LIMIT,
        });
    }
    let matrix = instance.constraint.matroid_matrix();
    let allowed = |set: &[usize]| -> bool {
        match &instance.constraint {
            FacilityConstraint::Knapsack { costs, budget } => {
                set.iter().map(|&f| costs[f]).sum::<u64>() <= *budget
            }
            FacilityConstraint::LinearMatroid { .. } => matrix
                .as_ref()
                .is_some_and(|m| m.rank_of_columns(set) == set.len()),
        }
    };
    let mut best: Option<(u64, Vec<usize>)> = None;
    for mask in 0u32..(1u32 << nf) {
        let set: Vec<usize> = (0..nf).filter(|f| mask >> f & 1 == 1).collect();
        let Some(r) = min_radius_for(instance, &set) else {
            continue;
        };
        let better = best
            .as_ref()
            .is_none_or(|(br, bs)| (r, set.len(), &set) < (*br, bs.len(), bs));
        if better && allowed(&set) {
            best = Some((r, set));
        }
    }
    best.map(|(radius, centers)| {
        let covered = coverage(&instance.space, &centers, radius)?;
        Ok(OptimalSolution {
            centers,
            radius,
            covered,
        })
    })
    .transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::tiny1_knapsack;

    #[test]
    fn tiny1_optimum() {
        let opt = brute_force_optimal(&tiny1_knapsack()).unwrap().unwrap();
        assert_eq!(opt.centers, vec![0]);
        assert_eq!(opt.radius, 1);
        assert_eq!(opt.covered, vec![2]);
    }

    #[test]
    fn zero_requirements_empty_optimum() {
        let mut inst = tiny1_knapsack();
        inst.requirements = vec![0];
        let opt = brute_force_optimal(&inst).unwrap().unwrap();
        assert!(opt.centers.is_empty());
        assert_eq!(opt.radius, 0);
    }

    #[test]
    fn excess_requirement_infeasible() {
        let mut inst = tiny1_knapsack();
        inst.requirements = vec![4];
        assert_eq!(brute_force_optimal(&inst).unwrap(), None);
    }
}
