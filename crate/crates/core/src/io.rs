//! JSON instance files.
//!
//! ```json
//! {"clients": ["c1"], "facilities": ["f1"], "dist": [[0, 1], [1, 0]],
//!  "gamma": 1, "weights": [[1]], "requirements": [1],
//!  "constraint": {"type": "knapsack", "costs": [1], "budget": 1}}
//! ```
//!
//! `dist` is row-major over clients then facilities. Numbers are read as
//! signed so that negative inputs produce a precise error instead of a
//! generic decode failure.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ColorfulSpace, FacilityConstraint, SupplierInstance};

/// Point ids may be written as strings or integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointId {
    Name(String),
    Number(i64),
}

impl PointId {
    fn into_name(self) -> String {
        match self {
            PointId::Name(s) => s,
            PointId::Number(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstraintFile {
    Knapsack { costs: Vec<i64>, budget: i64 },
    LinearMatroid { prime: i64, columns: Vec<Vec<i64>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub clients: Vec<PointId>,
    pub facilities: Vec<PointId>,
    pub dist: Vec<Vec<i64>>,
    pub gamma: usize,
    pub weights: Vec<Vec<i64>>,
    pub requirements: Vec<i64>,
    pub constraint: ConstraintFile,
}

fn nonneg(v: i64, field: &'static str) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::NegativeValue(field))
}

fn nonneg_vec(v: &[i64], field: &'static str) -> Result<Vec<u64>> {
    v.iter().map(|&x| nonneg(x, field)).collect()
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<SupplierInstance> {
        let clients: Vec<String> = self.clients.into_iter().map(PointId::into_name).collect();
        let facilities: Vec<String> = self
            .facilities
            .into_iter()
            .map(PointId::into_name)
            .collect();
        let dist = self
            .dist
            .iter()
            .map(|row| nonneg_vec(row, "dist"))
            .collect::<Result<Vec<_>>>()?;
        let mut weights = Vec::with_capacity(self.weights.len());
        for (c, row) in self.weights.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (l, &w) in row.iter().enumerate() {
                if w < 0 {
                    return Err(Error::NegativeWeight {
                        client: clients.get(c).cloned().unwrap_or_else(|| c.to_string()),
                        color: l,
                        value: w,
                    });
                }
                out.push(w as u64);
            }
            weights.push(out);
        }
        let constraint = match self.constraint {
            ConstraintFile::Knapsack { costs, budget } => FacilityConstraint::Knapsack {
                costs: nonneg_vec(&costs, "costs")?,
                budget: nonneg(budget, "budget")?,
            },
            ConstraintFile::LinearMatroid { prime, columns } => FacilityConstraint::LinearMatroid {
                prime: nonneg(prime, "prime")?,
                columns: columns
                    .iter()
                    .map(|c| nonneg_vec(c, "columns"))
                    .collect::<Result<_>>()?,
            },
        };
        let space = ColorfulSpace::new(clients, facilities, dist, self.gamma, weights)?;
        SupplierInstance::new(
            space,
            nonneg_vec(&self.requirements, "requirements")?,
            constraint,
        )
    }

    pub fn from_instance(inst: &SupplierInstance) -> Self {
        let s = &inst.space;
        let nc = s.n_clients();
        let nf = s.n_facilities();
        let d = |i: usize, j: usize| -> i64 {
            let v = match (i < nc, j < nc) {
                (true, true) => s.client_client(i, j),
                (true, false) => s.client_facility(i, j - nc),
                (false, true) => s.client_facility(j, i - nc),
                (false, false) => s.facility_facility(i - nc, j - nc),
            };
            v as i64
        };
        let n = nc + nf;
        let to_i = |v: &[u64]| v.iter().map(|&x| x as i64).collect::<Vec<_>>();
        Self {
            clients: s.client_ids().iter().cloned().map(PointId::Name).collect(),
            facilities: s
                .facility_ids()
                .iter()
                .cloned()
                .map(PointId::Name)
                .collect(),
            dist: (0..n).map(|i| (0..n).map(|j| d(i, j)).collect()).collect(),
            gamma: s.gamma(),
            weights: (0..nc).map(|c| to_i(s.weights_of(c))).collect(),
            requirements: to_i(&inst.requirements),
            constraint: match &inst.constraint {
                FacilityConstraint::Knapsack { costs, budget } => ConstraintFile::Knapsack {
                    costs: to_i(costs),
                    budget: *budget as i64,
                },
                FacilityConstraint::LinearMatroid { prime, columns } => {
                    ConstraintFile::LinearMatroid {
                        prime: *prime as i64,
                        columns: columns.iter().map(|c| to_i(c)).collect(),
                    }
                }
            },
        }
    }
}

pub fn parse_instance(json: &str) -> Result<SupplierInstance> {
    let file: InstanceFile = serde_json::from_str(json)?;
    file.into_instance()
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<SupplierInstance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn instance_to_json(inst: &SupplierInstance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("serializable")
}

pub fn write_instance(path: impl AsRef<Path>, inst: &SupplierInstance) -> Result<()> {
    std::fs::write(path, instance_to_json(inst))?;
    Ok(())
}
