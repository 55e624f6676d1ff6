//! Seeded random instances on an integer line.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linmat::PrimeFieldMatrix;
use crate::model::{
    coverage, radius_schedule, ColorfulSpace, FacilityConstraint, SupplierInstance,
};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    #[default]
    Knapsack,
    LinearMatroid,
}

fn default_cost_max() -> u64 {
    5
}
fn default_rows() -> usize {
    3
}
fn default_prime() -> u64 {
    101
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub n_clients: usize,
    pub n_facilities: usize,
    pub gamma: usize,
    #[serde(default)]
    pub constraint_kind: ConstraintKind,
    pub max_dist: u64,
    pub weight_max: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cost_max")]
    pub cost_max: u64,
    /// Rows of random matroid columns; bounds the rank.
    #[serde(default = "default_rows")]
    pub matroid_rows: usize,
    #[serde(default = "default_prime")]
    pub prime: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            n_clients: 5,
            n_facilities: 4,
            gamma: 1,
            constraint_kind: ConstraintKind::Knapsack,
            max_dist: 12,
            weight_max: 3,
            seed: 0,
            cost_max: default_cost_max(),
            matroid_rows: default_rows(),
            prime: default_prime(),
        }
    }
}

const GEN_TAG: u64 = 0x67656e;

/// Random instance with a line metric. Each client carries weight in a single
/// color drawn uniformly, so normalization never splits it. Requirements are
/// drawn below the coverage of a feasible facility set at a random radius, so
/// every generated instance is feasible.
pub fn generate_instance(params: &GenParams) -> Result<SupplierInstance> {
    let mut rng = seed::rng(params.seed, &[GEN_TAG]);
    let (nc, nf, g) = (params.n_clients, params.n_facilities, params.gamma);
    let pos: Vec<u64> = (0..nc + nf)
        .map(|_| rng.gen_range(0..=params.max_dist))
        .collect();
    let dist: Vec<Vec<u64>> = pos
        .iter()
        .map(|a| pos.iter().map(|b| a.abs_diff(*b)).collect())
        .collect();
    let weights: Vec<Vec<u64>> = (0..nc)
        .map(|_| {
            let mut w = vec![0; g];
            if g > 0 {
                let color = rng.gen_range(0..g);
                w[color] = rng.gen_range(0..=params.weight_max);
            }
            w
        })
        .collect();
    let clients = (0..nc).map(|i| format!("c{i}")).collect();
    let facilities = (0..nf).map(|j| format!("f{j}")).collect();
    let space = ColorfulSpace::new(clients, facilities, dist, g, weights)?;

    let (constraint, witness) = match params.constraint_kind {
        ConstraintKind::Knapsack => {
            let costs: Vec<u64> = (0..nf)
                .map(|_| rng.gen_range(0..=params.cost_max))
                .collect();
            let witness: Vec<usize> = (0..nf).filter(|_| rng.gen_bool(0.5)).collect();
            let budget = witness.iter().map(|&f| costs[f]).sum();
            (FacilityConstraint::Knapsack { costs, budget }, witness)
        }
        ConstraintKind::LinearMatroid => {
            let rows = params.matroid_rows.max(1);
            let columns = loop {
                let cols: Vec<Vec<u64>> = (0..nf)
                    .map(|_| (0..rows).map(|_| rng.gen_range(0..params.prime)).collect())
                    .collect();
                let m = PrimeFieldMatrix::from_columns(params.prime, rows, &cols)?;
                if nf == 0 || m.rank() >= 1 {
                    break cols;
                }
            };
            let m = PrimeFieldMatrix::from_columns(params.prime, rows, &columns)?;
            let mut order: Vec<usize> = (0..nf).collect();
            order.shuffle(&mut rng);
            let take = rng.gen_range(0..=nf);
            let mut witness: Vec<usize> = Vec::new();
            for &f in order.iter().take(take) {
                witness.push(f);
                if m.rank_of_columns(&witness) < witness.len() {
                    witness.pop();
                }
            }
            witness.sort_unstable();
            (
                FacilityConstraint::LinearMatroid {
                    prime: params.prime,
                    columns,
                },
                witness,
            )
        }
    };
    let radii = radius_schedule(&space);
    let r = radii[rng.gen_range(0..radii.len())];
    let cov = coverage(&space, &witness, r)?;
    let requirements = cov.iter().map(|&c| rng.gen_range(0..=c)).collect();
    SupplierInstance::new(space, requirements, constraint)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XwbInstance {
    pub prime: u64,
    /// One column per ground element.
    pub columns: Vec<Vec<u64>>,
    pub weights: Vec<u64>,
    pub target: u64,
}

impl XwbInstance {
    pub fn matrix(&self) -> Result<PrimeFieldMatrix> {
        PrimeFieldMatrix::from_columns(
            self.prime,
            self.columns.first().map_or(0, Vec::len),
            &self.columns,
        )
    }
}

/// Random exact-weight-basis instance with at most `rows` x `cols` entries
/// over F_p. Half of the targets are weights of a random basis.
pub fn random_xwb(
    seed_value: u64,
    rows: usize,
    cols: usize,
    weight_max: u64,
    prime: u64,
) -> Result<XwbInstance> {
    let mut rng = seed::rng(seed_value, &[GEN_TAG, 1]);
    let rows = rng.gen_range(1..=rows.max(1));
    let cols = rng.gen_range(1..=cols.max(1));
    let columns: Vec<Vec<u64>> = (0..cols)
        .map(|_| (0..rows).map(|_| rng.gen_range(0..prime)).collect())
        .collect();
    let weights: Vec<u64> = (0..cols).map(|_| rng.gen_range(0..=weight_max)).collect();
    let m = PrimeFieldMatrix::from_columns(prime, rows, &columns)?;
    let rank = m.rank();
    let target = if rng.gen_bool(0.5) {
        let mut order: Vec<usize> = (0..cols).collect();
        order.shuffle(&mut rng);
        let mut basis = Vec::new();
        for e in order {
            basis.push(e);
            if m.rank_of_columns(&basis) < basis.len() {
                basis.pop();
            }
        }
        basis.iter().map(|&e| weights[e]).sum()
    } else {
        rng.gen_range(0..=weight_max * rank as u64)
    };
    Ok(XwbInstance {
        prime,
        columns,
        weights,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::instance_to_json;
    use crate::model::{normalize_and_validate, ValidateOptions};

    #[test]
    fn deterministic_in_seed() {
        let p = GenParams {
            seed: 9,
            ..GenParams::default()
        };
        assert_eq!(
            instance_to_json(&generate_instance(&p).unwrap()),
            instance_to_json(&generate_instance(&p).unwrap())
        );
        let q = GenParams {
            seed: 10,
            ..p.clone()
        };
        assert_ne!(
            generate_instance(&p).unwrap(),
            generate_instance(&q).unwrap()
        );
    }

    #[test]
    fn empty_client_set() {
        let p = GenParams {
            n_clients: 0,
            ..GenParams::default()
        };
        let inst = generate_instance(&p).unwrap();
        assert_eq!(inst.space.n_clients(), 0);
        assert!(inst.requirements.iter().all(|&m| m == 0));
    }

    #[test]
    fn generated_instances_validate() {
        for s in 0..40 {
            for kind in [ConstraintKind::Knapsack, ConstraintKind::LinearMatroid] {
                let p = GenParams {
                    seed: s,
                    gamma: 1 + (s as usize % 2),
                    constraint_kind: kind,
                    ..GenParams::default()
                };
                let inst = generate_instance(&p).unwrap();
                normalize_and_validate(&inst, ValidateOptions::default()).unwrap();
            }
        }
    }
}
