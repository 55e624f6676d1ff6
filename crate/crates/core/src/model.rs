//! Colorful spaces, supplier instances and the elementary geometry on them.
//!
//! Points are addressed by dense indices: clients `0..n_clients()` and
//! facilities `0..n_facilities()`, each in their own index space. The
//! underlying matrix orders clients first, then facilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linmat::field::{is_prime, PrimeFieldMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorfulSpace {
    clients: Vec<String>,
    facilities: Vec<String>,
    dist: Vec<u64>,
    gamma: usize,
    weights: Vec<Vec<u64>>,
    /// For each client, the id of the client it was split from.
    origin: Vec<String>,
}

impl ColorfulSpace {
    /// `dist` is the square matrix over clients then facilities and
    /// `weights[c][l]` the color-`l` weight of client `c`.
    pub fn new(
        clients: Vec<String>,
        facilities: Vec<String>,
        dist: Vec<Vec<u64>>,
        gamma: usize,
        weights: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let n = clients.len() + facilities.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!(
                "distance matrix must be {n}x{n} (clients then facilities)"
            )));
        }
        if weights.len() != clients.len() {
            return Err(Error::Shape(format!(
                "expected {} weight rows, got {}",
                clients.len(),
                weights.len()
            )));
        }
        if let Some(c) = weights.iter().position(|w| w.len() != gamma) {
            return Err(Error::Shape(format!(
                "client {} has {} weights, expected gamma = {gamma}",
                clients[c],
                weights[c].len()
            )));
        }
        let origin = clients.clone();
        Ok(Self {
            clients,
            facilities,
            dist: dist.into_iter().flatten().collect(),
            gamma,
            weights,
            origin,
        })
    }

    pub fn n_clients(&self) -> usize {
        self.clients.len()
    }

    pub fn n_facilities(&self) -> usize {
        self.facilities.len()
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn client_id(&self, c: usize) -> &str {
        &self.clients[c]
    }

    pub fn facility_id(&self, f: usize) -> &str {
        &self.facilities[f]
    }

    pub fn client_ids(&self) -> &[String] {
        &self.clients
    }

    pub fn facility_ids(&self) -> &[String] {
        &self.facilities
    }

    /// Id of the input client that `c` was copied from during normalization.
    pub fn origin_of(&self, c: usize) -> &str {
        &self.origin[c]
    }

    fn n_points(&self) -> usize {
        self.clients.len() + self.facilities.len()
    }

    #[inline]
    fn point_dist(&self, i: usize, j: usize) -> u64 {
        self.dist[i * self.n_points() + j]
    }

    #[inline]
    pub fn client_facility(&self, c: usize, f: usize) -> u64 {
        self.point_dist(c, self.clients.len() + f)
    }

    #[inline]
    pub fn client_client(&self, a: usize, b: usize) -> u64 {
        self.point_dist(a, b)
    }

    #[inline]
    pub fn facility_facility(&self, f: usize, g: usize) -> u64 {
        let off = self.clients.len();
        self.point_dist(off + f, off + g)
    }

    #[inline]
    pub fn weight(&self, c: usize, color: usize) -> u64 {
        self.weights[c][color]
    }

    pub fn weights_of(&self, c: usize) -> &[u64] {
        &self.weights[c]
    }

    /// W_l: the total color-`l` weight, the size bound for every DP.
    pub fn total_weight(&self, color: usize) -> u64 {
        self.weights.iter().map(|w| w[color]).sum()
    }

    pub fn total_weights(&self) -> Vec<u64> {
        (0..self.gamma).map(|l| self.total_weight(l)).collect()
    }

    /// Per-color weight of a client set.
    pub fn weight_of_set(&self, clients: impl IntoIterator<Item = usize>) -> Vec<u64> {
        let mut acc = vec![0; self.gamma];
        for c in clients {
            for (a, w) in acc.iter_mut().zip(&self.weights[c]) {
                *a += w;
            }
        }
        acc
    }

    pub fn clients_within(&self, f: usize, r: u64) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_clients()).filter(move |&c| self.client_facility(c, f) <= r)
    }

    pub fn facilities_within(&self, c: usize, r: u64) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_facilities()).filter(move |&f| self.client_facility(c, f) <= r)
    }

    /// min over `part` of d(a, f).
    pub fn set_facility_distance(&self, part: &[usize], f: usize) -> Option<u64> {
        part.iter().map(|&a| self.client_facility(a, f)).min()
    }

    pub fn diameter(&self, part: &[usize]) -> u64 {
        let mut best = 0;
        for (i, &a) in part.iter().enumerate() {
            for &b in &part[i + 1..] {
                best = best.max(self.client_client(a, b));
            }
        }
        best
    }

    fn point_name(&self, i: usize) -> String {
        if i < self.clients.len() {
            self.clients[i].clone()
        } else {
            self.facilities[i - self.clients.len()].clone()
        }
    }

    /// Checks zero diagonal, symmetry and (optionally) the triangle inequality.
    pub fn validate_metric(&self, check_triangle: bool) -> Result<()> {
        let n = self.n_points();
        for i in 0..n {
            if self.point_dist(i, i) != 0 {
                return Err(Error::NonzeroDiagonal(self.point_name(i)));
            }
            for j in i + 1..n {
                if self.point_dist(i, j) != self.point_dist(j, i) {
                    return Err(Error::Asymmetric(self.point_name(i), self.point_name(j)));
                }
            }
        }
        if check_triangle {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.point_dist(a, b);
                    for c in 0..n {
                        if self.point_dist(a, c) > ab + self.point_dist(b, c) {
                            return Err(Error::TriangleViolation {
                                a: self.point_name(a),
                                b: self.point_name(b),
                                c: self.point_name(c),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn has_disjoint_supports(&self) -> bool {
        self.weights
            .iter()
            .all(|w| w.iter().filter(|&&x| x > 0).count() <= 1)
    }

    /// Replaces every client carrying k >= 2 colors by k co-located copies.
    fn split_colors(&self) -> Self {
        if self.has_disjoint_supports() {
            return self.clone();
        }
        // (source client, color carried or None for an uncolored client)
        let mut plan: Vec<(usize, Option<usize>)> = Vec::new();
        for c in 0..self.n_clients() {
            let colors: Vec<usize> = (0..self.gamma)
                .filter(|&l| self.weights[c][l] > 0)
                .collect();
            if colors.len() <= 1 {
                plan.push((c, None));
            } else {
                plan.extend(colors.into_iter().map(|l| (c, Some(l))));
            }
        }
        let nc = plan.len();
        let nf = self.n_facilities();
        let n = nc + nf;
        let source = |i: usize| -> usize {
            if i < nc {
                plan[i].0
            } else {
                self.n_clients() + (i - nc)
            }
        };
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(self.point_dist(source(i), source(j)));
            }
        }
        let mut clients = Vec::with_capacity(nc);
        let mut weights = Vec::with_capacity(nc);
        let mut origin = Vec::with_capacity(nc);
        for &(c, color) in &plan {
            match color {
                None => {
                    clients.push(self.clients[c].clone());
                    weights.push(self.weights[c].clone());
                }
                Some(l) => {
                    clients.push(format!("{}#{}", self.clients[c], l + 1));
                    let mut w = vec![0; self.gamma];
                    w[l] = self.weights[c][l];
                    weights.push(w);
                }
            }
            origin.push(self.origin[c].clone());
        }
        Self {
            clients,
            facilities: self.facilities.clone(),
            dist,
            gamma: self.gamma,
            weights,
            origin,
        }
    }
}

/// Down-closed family of feasible facility sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FacilityConstraint {
    Knapsack {
        costs: Vec<u64>,
        budget: u64,
    },
    /// One column per facility; entries are reduced mod `prime`.
    LinearMatroid {
        prime: u64,
        columns: Vec<Vec<u64>>,
    },
}

impl FacilityConstraint {
    pub fn kind(&self) -> &'static str {
        match self {
            FacilityConstraint::Knapsack { .. } => "knapsack",
            FacilityConstraint::LinearMatroid { .. } => "linear_matroid",
        }
    }

    /// Number of ground elements the constraint ranges over.
    pub fn ground_size(&self) -> usize {
        match self {
            FacilityConstraint::Knapsack { costs, .. } => costs.len(),
            FacilityConstraint::LinearMatroid { columns, .. } => columns.len(),
        }
    }

    pub fn matroid_matrix(&self) -> Option<PrimeFieldMatrix> {
        match self {
            FacilityConstraint::LinearMatroid { prime, columns } => {
                PrimeFieldMatrix::from_columns(*prime, 0, columns).ok()
            }
            FacilityConstraint::Knapsack { .. } => None,
        }
    }

    pub fn validate(&self, n_facilities: usize) -> Result<()> {
        match self {
            FacilityConstraint::Knapsack { costs, .. } => {
                if costs.len() != n_facilities {
                    return Err(Error::Shape(format!(
                        "knapsack has {} costs for {n_facilities} facilities",
                        costs.len()
                    )));
                }
            }
            FacilityConstraint::LinearMatroid { prime, columns } => {
                if !is_prime(*prime) {
                    return Err(Error::NonPrimeField(*prime));
                }
                if columns.len() != n_facilities {
                    return Err(Error::Shape(format!(
                        "matroid has {} columns for {n_facilities} facilities",
                        columns.len()
                    )));
                }
                if let Some(first) = columns.first() {
                    if columns.iter().any(|c| c.len() != first.len()) {
                        return Err(Error::Shape("matroid columns have unequal lengths".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether `set` (indices into the ground set) is feasible.
    pub fn is_feasible(&self, set: &[usize]) -> Result<bool> {
        if let Some(&bad) = set.iter().find(|&&f| f >= self.ground_size()) {
            return Err(Error::UnknownFacility(bad));
        }
        Ok(match self {
            FacilityConstraint::Knapsack { costs, budget } => {
                set.iter().map(|&f| costs[f]).sum::<u64>() <= *budget
            }
            FacilityConstraint::LinearMatroid { .. } => {
                let mut sorted = set.to_vec();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != set.len() {
                    // repeated columns are dependent
                    return Ok(false);
                }
                let m = self.matroid_matrix().expect("validated matroid");
                m.rank_of_columns(set) == set.len()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupplierInstance {
    pub space: ColorfulSpace,
    pub requirements: Vec<u64>,
    pub constraint: FacilityConstraint,
}

impl SupplierInstance {
    pub fn new(
        space: ColorfulSpace,
        requirements: Vec<u64>,
        constraint: FacilityConstraint,
    ) -> Result<Self> {
        if requirements.len() != space.gamma() {
            return Err(Error::Shape(format!(
                "{} requirements for gamma = {}",
                requirements.len(),
                space.gamma()
            )));
        }
        Ok(Self {
            space,
            requirements,
            constraint,
        })
    }

    pub fn gamma(&self) -> usize {
        self.space.gamma()
    }

    /// Colors whose requirement exceeds the total available weight; such
    /// instances can never be satisfied.
    pub fn unreachable_colors(&self) -> Vec<usize> {
        (0..self.gamma())
            .filter(|&l| self.requirements[l] > self.space.total_weight(l))
            .collect()
    }

    pub fn knapsack(&self) -> Option<(&[u64], u64)> {
        match &self.constraint {
            FacilityConstraint::Knapsack { costs, budget } => Some((costs, *budget)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    pub check_triangle: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            check_triangle: true,
        }
    }
}

/// Validates the metric and constraint, then splits multi-colored clients into
/// co-located single-colored copies so that color supports are disjoint.
pub fn normalize_and_validate(
    raw: &SupplierInstance,
    opts: ValidateOptions,
) -> Result<SupplierInstance> {
    raw.space.validate_metric(opts.check_triangle)?;
    raw.constraint.validate(raw.space.n_facilities())?;
    SupplierInstance::new(
        raw.space.split_colors(),
        raw.requirements.clone(),
        raw.constraint.clone(),
    )
}

/// Sorted distinct client-facility distances.
pub fn radius_candidates(space: &ColorfulSpace) -> Vec<u64> {
    let mut out: Vec<u64> = (0..space.n_clients())
        .flat_map(|c| (0..space.n_facilities()).map(move |f| space.client_facility(c, f)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Radii every solver tries, ascending: 0 followed by the distinct
/// client-facility distances. Zero matters only when every requirement is
/// zero, where the empty solution is optimal at any radius.
pub fn radius_schedule(space: &ColorfulSpace) -> Vec<u64> {
    let mut out = radius_candidates(space);
    if out.first() != Some(&0) {
        out.insert(0, 0);
    }
    out
}

/// Membership mask of B_C(S, r).
pub fn covered_mask(space: &ColorfulSpace, centers: &[usize], r: u64) -> Result<Vec<bool>> {
    if let Some(&bad) = centers.iter().find(|&&f| f >= space.n_facilities()) {
        return Err(Error::UnknownFacility(bad));
    }
    Ok((0..space.n_clients())
        .map(|c| centers.iter().any(|&f| space.client_facility(c, f) <= r))
        .collect())
}

/// (w_l(B_C(S, r)))_l.
pub fn coverage(space: &ColorfulSpace, centers: &[usize], r: u64) -> Result<Vec<u64>> {
    let mask = covered_mask(space, centers, r)?;
    Ok(space.weight_of_set((0..space.n_clients()).filter(|&c| mask[c])))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupplierSolution {
    pub centers: Vec<usize>,
    pub radius: u64,
    pub covered: Vec<u64>,
    pub feasible: bool,
}

pub fn check_solution(
    instance: &SupplierInstance,
    centers: &[usize],
    r: u64,
) -> Result<SupplierSolution> {
    let covered = coverage(&instance.space, centers, r)?;
    let meets = covered
        .iter()
        .zip(&instance.requirements)
        .all(|(c, m)| c >= m);
    let allowed = instance.constraint.is_feasible(centers)?;
    let mut sorted = centers.to_vec();
    sorted.sort_unstable();
    Ok(SupplierSolution {
        centers: sorted,
        radius: r,
        covered,
        feasible: meets && allowed,
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Three unit-weight clients and two facilities: c1, c2 sit at distance 1
    /// from f1 and 5 from f2, c3 the reverse; d(f1, f2) = 4.
    pub fn tiny1_space() -> ColorfulSpace {
        let ids = |p: &str, n: usize| (1..=n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        // order: c1 c2 c3 f1 f2
        let dist = vec![
            vec![0, 2, 6, 1, 5],
            vec![2, 0, 6, 1, 5],
            vec![6, 6, 0, 5, 1],
            vec![1, 1, 5, 0, 4],
            vec![5, 5, 1, 4, 0],
        ];
        ColorfulSpace::new(ids("c", 3), ids("f", 2), dist, 1, vec![vec![1]; 3]).unwrap()
    }

    pub fn tiny1_knapsack() -> SupplierInstance {
        SupplierInstance::new(
            tiny1_space(),
            vec![2],
            FacilityConstraint::Knapsack {
                costs: vec![1, 1],
                budget: 1,
            },
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn disjoint_supports_unchanged() {
        let inst = tiny1_knapsack();
        let norm = normalize_and_validate(&inst, ValidateOptions::default()).unwrap();
        assert_eq!(norm, inst);
    }

    #[test]
    fn two_colored_client_is_split() {
        let space = ColorfulSpace::new(
            vec!["a".into(), "b".into()],
            vec!["f".into()],
            vec![vec![0, 3, 1], vec![3, 0, 2], vec![1, 2, 0]],
            2,
            vec![vec![2, 3], vec![0, 1]],
        )
        .unwrap();
        let inst = SupplierInstance::new(
            space,
            vec![1, 1],
            FacilityConstraint::Knapsack {
                costs: vec![1],
                budget: 1,
            },
        )
        .unwrap();
        let norm = normalize_and_validate(&inst, ValidateOptions::default()).unwrap();
        let s = &norm.space;
        assert_eq!(s.n_clients(), 3);
        assert_eq!(s.weights_of(0), &[2, 0]);
        assert_eq!(s.weights_of(1), &[0, 3]);
        assert_eq!(s.weights_of(2), &[0, 1]);
        assert_eq!(s.client_client(0, 1), 0);
        assert_eq!(s.client_client(0, 2), 3);
        assert_eq!(s.client_client(1, 2), 3);
        assert_eq!(s.client_facility(0, 0), 1);
        assert_eq!(s.client_facility(1, 0), 1);
        assert_eq!(s.origin_of(1), "a");
        assert_eq!(s.client_id(1), "a#2");
        assert_eq!(s.total_weights(), vec![2, 4]);
    }

    #[test]
    fn triangle_violation_reported() {
        let space = ColorfulSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![],
            vec![vec![0, 1, 5], vec![1, 0, 1], vec![5, 1, 0]],
            0,
            vec![vec![]; 3],
        )
        .unwrap();
        let inst = SupplierInstance::new(
            space,
            vec![],
            FacilityConstraint::Knapsack {
                costs: vec![],
                budget: 0,
            },
        )
        .unwrap();
        let err = normalize_and_validate(&inst, ValidateOptions::default()).unwrap_err();
        assert_eq!(
            err,
            Error::TriangleViolation {
                a: "a".into(),
                b: "b".into(),
                c: "c".into()
            }
        );
        let ok = normalize_and_validate(
            &inst,
            ValidateOptions {
                check_triangle: false,
            },
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn non_prime_field_rejected() {
        let inst = SupplierInstance::new(
            tiny1_space(),
            vec![1],
            FacilityConstraint::LinearMatroid {
                prime: 9,
                columns: vec![vec![1], vec![1]],
            },
        )
        .unwrap();
        assert_eq!(
            normalize_and_validate(&inst, ValidateOptions::default()).unwrap_err(),
            Error::NonPrimeField(9)
        );
    }

    #[test]
    fn radius_candidate_examples() {
        assert_eq!(radius_candidates(&tiny1_space()), vec![1, 5]);
        let empty = ColorfulSpace::new(vec![], vec!["f".into()], vec![vec![0]], 0, vec![]).unwrap();
        assert!(radius_candidates(&empty).is_empty());
        let flat = ColorfulSpace::new(
            vec!["a".into(), "b".into()],
            vec!["f".into()],
            vec![vec![0, 0, 7], vec![0, 0, 7], vec![7, 7, 0]],
            0,
            vec![vec![]; 2],
        )
        .unwrap();
        assert_eq!(radius_candidates(&flat), vec![7]);
    }

    #[test]
    fn coverage_examples() {
        let s = tiny1_space();
        assert_eq!(coverage(&s, &[], 5).unwrap(), vec![0]);
        assert_eq!(coverage(&s, &[0], 1).unwrap(), vec![2]);
        assert_eq!(coverage(&s, &[0, 1], 6).unwrap(), s.total_weights());
        assert_eq!(
            coverage(&s, &[7], 1).unwrap_err(),
            Error::UnknownFacility(7)
        );
    }

    #[test]
    fn check_solution_examples() {
        let inst = tiny1_knapsack();
        let sol = check_solution(&inst, &[0], 1).unwrap();
        assert!(sol.feasible);
        assert_eq!(sol.covered, vec![2]);
        let over = check_solution(&inst, &[0, 1], 1).unwrap();
        assert!(!over.feasible);
        let mut zero = inst.clone();
        zero.requirements = vec![0];
        assert!(check_solution(&zero, &[], 0).unwrap().feasible);
    }

    fn line_space(pos_c: &[u64], pos_f: &[u64], weights: Vec<Vec<u64>>) -> ColorfulSpace {
        let pts: Vec<u64> = pos_c.iter().chain(pos_f).copied().collect();
        let dist = pts
            .iter()
            .map(|&a| pts.iter().map(|&b| a.abs_diff(b)).collect())
            .collect();
        let gamma = weights.first().map_or(0, Vec::len);
        ColorfulSpace::new(
            (0..pos_c.len()).map(|i| format!("c{i}")).collect(),
            (0..pos_f.len()).map(|i| format!("f{i}")).collect(),
            dist,
            gamma,
            weights,
        )
        .unwrap()
    }

    fn arb_space() -> impl Strategy<Value = ColorfulSpace> {
        (1usize..7, 1usize..5, 0usize..3).prop_flat_map(|(nc, nf, g)| {
            (
                prop::collection::vec(0u64..15, nc),
                prop::collection::vec(0u64..15, nf),
                prop::collection::vec(prop::collection::vec(0u64..4, g), nc),
            )
                .prop_map(|(pc, pf, w)| line_space(&pc, &pf, w))
        })
    }

    proptest! {
        #[test]
        fn coverage_monotone(space in arb_space(), mask in 0u32..16, extra in 0u32..16, r in 0u64..16, dr in 0u64..5) {
            let nf = space.n_facilities();
            let small: Vec<usize> = (0..nf).filter(|f| mask >> f & 1 == 1).collect();
            let big: Vec<usize> = (0..nf).filter(|f| (mask | extra) >> f & 1 == 1).collect();
            let a = coverage(&space, &small, r).unwrap();
            let b = coverage(&space, &big, r).unwrap();
            let c = coverage(&space, &small, r + dr).unwrap();
            for l in 0..space.gamma() {
                prop_assert!(a[l] <= b[l]);
                prop_assert!(a[l] <= c[l]);
            }
        }

        #[test]
        fn coverage_matches_double_loop(space in arb_space(), mask in 0u32..16) {
            let centers: Vec<usize> = (0..space.n_facilities()).filter(|f| mask >> f & 1 == 1).collect();
            for &r in &radius_candidates(&space) {
                let mut naive = vec![0u64; space.gamma()];
                for c in 0..space.n_clients() {
                    let mut hit = false;
                    for &f in &centers {
                        if space.client_facility(c, f) <= r { hit = true; }
                    }
                    if hit {
                        for l in 0..space.gamma() { naive[l] += space.weight(c, l); }
                    }
                }
                prop_assert_eq!(coverage(&space, &centers, r).unwrap(), naive);
            }
        }

        #[test]
        fn normalization_idempotent(space in arb_space()) {
            let g = space.gamma();
            let inst = SupplierInstance::new(space, vec![0; g], FacilityConstraint::Knapsack { costs: vec![1; 4], budget: 2 }).unwrap();
            let mut inst = inst;
            inst.constraint = FacilityConstraint::Knapsack { costs: vec![1; inst.space.n_facilities()], budget: 2 };
            let once = normalize_and_validate(&inst, ValidateOptions::default()).unwrap();
            let twice = normalize_and_validate(&once, ValidateOptions::default()).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(once.space.total_weights(), inst.space.total_weights());
        }
    }
}
