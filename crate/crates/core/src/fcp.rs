//! Cover-promise instances: a set family over a weighted universe where a
//! feasible subfamily must reach every color requirement.
//!
//! The promise is that some feasible subfamily has a choice of one
//! representative per set whose summed weights (with multiplicity) meet the
//! requirements. Solvers never check the promise; they report `None` when they
//! fail and the caller treats that as a wrong guess.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ColorfulSpace, FacilityConstraint};
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FcpInstance {
    pub universe: Vec<String>,
    /// `sets[h]`: sorted element indices of H_h. Set ids are facility indices.
    pub sets: Vec<Vec<usize>>,
    /// `weights[u][l]`.
    pub weights: Vec<Vec<u64>>,
    pub requirements: Vec<u64>,
    /// Interpreted over set ids.
    pub constraint: FacilityConstraint,
}

impl FcpInstance {
    pub fn new(
        universe: Vec<String>,
        mut sets: Vec<Vec<usize>>,
        weights: Vec<Vec<u64>>,
        requirements: Vec<u64>,
        constraint: FacilityConstraint,
    ) -> Result<Self> {
        let n = universe.len();
        if weights.len() != n {
            return Err(Error::Shape(format!(
                "{} weight rows for {n} universe elements",
                weights.len()
            )));
        }
        let gamma = requirements.len();
        if weights.iter().any(|w| w.len() != gamma) {
            return Err(Error::Shape(format!(
                "every element needs {gamma} color weights"
            )));
        }
        for set in &mut sets {
            if set.iter().any(|&u| u >= n) {
                return Err(Error::Shape("set references an unknown element".into()));
            }
            set.sort_unstable();
            set.dedup();
        }
        constraint.validate(sets.len())?;
        Ok(Self {
            universe,
            sets,
            weights,
            requirements,
            constraint,
        })
    }

    pub fn gamma(&self) -> usize {
        self.requirements.len()
    }

    pub fn n_elements(&self) -> usize {
        self.universe.len()
    }

    pub fn n_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn total_weights(&self) -> Vec<u64> {
        (0..self.gamma())
            .map(|l| self.weights.iter().map(|w| w[l]).sum())
            .collect()
    }

    /// Elements of the union of the given sets, sorted.
    pub fn union(&self, sets: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = sets
            .iter()
            .flat_map(|&h| self.sets[h].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn weight_of(&self, elements: &[usize]) -> Vec<u64> {
        let mut acc = vec![0; self.gamma()];
        for &u in elements {
            for (a, w) in acc.iter_mut().zip(&self.weights[u]) {
                *a += w;
            }
        }
        acc
    }

    /// w_l of the union of `sets`, elements counted once.
    pub fn union_weight(&self, sets: &[usize]) -> Vec<u64> {
        self.weight_of(&self.union(sets))
    }

    pub fn meets_requirements(&self, covered: &[u64]) -> bool {
        covered.iter().zip(&self.requirements).all(|(c, m)| c >= m)
    }

    /// Whether `sets` is a constraint-feasible family covering every requirement.
    pub fn is_solution(&self, sets: &[usize]) -> Result<bool> {
        Ok(self.constraint.is_feasible(sets)? && self.meets_requirements(&self.union_weight(sets)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let raw: FcpInstance = serde_json::from_str(json)?;
        Self::new(
            raw.universe,
            raw.sets,
            raw.weights,
            raw.requirements,
            raw.constraint,
        )
    }
}

/// The universe is the partition's parts and H_f = {A : d(A, f) <= r}.
pub fn build_fcp(
    space: &ColorfulSpace,
    partition: &Partition,
    r: u64,
    requirements: &[u64],
    constraint: &FacilityConstraint,
) -> FcpInstance {
    let universe = partition
        .parts
        .iter()
        .map(|a| {
            a.iter()
                .map(|&c| space.client_id(c))
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();
    let sets = (0..space.n_facilities())
        .map(|f| {
            (0..partition.parts.len())
                .filter(|&k| {
                    space
                        .set_facility_distance(&partition.parts[k], f)
                        .is_some_and(|d| d <= r)
                })
                .collect()
        })
        .collect();
    let weights = partition
        .parts
        .iter()
        .map(|a| space.weight_of_set(a.iter().copied()))
        .collect();
    FcpInstance {
        universe,
        sets,
        weights,
        requirements: requirements.to_vec(),
        constraint: constraint.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FcpSolution {
    /// Selected set ids, sorted.
    pub sets: Vec<usize>,
    pub covered: Vec<u64>,
    /// κ of the selected sets (knapsack only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverChoice {
    pub cost: u64,
    /// Selected item indices, ascending.
    pub items: Vec<usize>,
}

pub const DP_STATE_LIMIT: usize = 1 << 24;

/// min Σ cost(i)·z(i) s.t. Σ weight(i)·z(i) >= target componentwise, z binary.
///
/// Items with cost `None` are never selected. States are requirement vectors
/// capped at `targets`; items are processed in index order and ties keep the
/// earlier table entry, so the recovered choice is deterministic.
pub fn cover_dp(
    weights: &[Vec<u64>],
    costs: &[Option<u64>],
    targets: &[u64],
) -> Result<Option<CoverChoice>> {
    debug_assert_eq!(weights.len(), costs.len());
    let mut strides = Vec::with_capacity(targets.len());
    let mut states: usize = 1;
    for &t in targets {
        strides.push(states);
        states = usize::try_from(t)
            .ok()
            .and_then(|t| t.checked_add(1))
            .and_then(|t| states.checked_mul(t))
            .filter(|&s| s <= DP_STATE_LIMIT)
            .ok_or(Error::SizeLimitExceeded {
                what: "dp states",
                size: usize::MAX,
                limit: DP_STATE_LIMIT,
            })?;
    }
    let decode = |s: usize| -> Vec<u64> {
        targets
            .iter()
            .zip(&strides)
            .map(|(&t, &st)| ((s / st) % (t as usize + 1)) as u64)
            .collect()
    };
    let advance = |s: usize, w: &[u64]| -> usize {
        let v = decode(s);
        v.iter()
            .zip(w)
            .zip(targets.iter().zip(&strides))
            .map(|((&a, &b), (&t, &st))| (a + b).min(t) as usize * st)
            .sum()
    };

    const INF: u64 = u64::MAX;
    let mut layers: Vec<Vec<u64>> = Vec::with_capacity(weights.len() + 1);
    let mut cur = vec![INF; states];
    cur[0] = 0;
    layers.push(cur.clone());
    for (w, c) in weights.iter().zip(costs) {
        let mut next = cur.clone();
        if let Some(c) = *c {
            for s in 0..states {
                if cur[s] == INF {
                    continue;
                }
                let t = advance(s, w);
                let v = cur[s].saturating_add(c);
                if v < next[t] {
                    next[t] = v;
                }
            }
        }
        layers.push(next.clone());
        cur = next;
    }
    let goal = states - 1;
    if cur[goal] == INF {
        return Ok(None);
    }
    let mut items = Vec::new();
    let mut s = goal;
    for i in (0..weights.len()).rev() {
        if layers[i + 1][s] == layers[i][s] {
            continue;
        }
        let c = costs[i].expect("only priced items change the table");
        let prev = (0..states)
            .find(|&p| {
                layers[i][p] != INF
                    && layers[i][p] + c == layers[i + 1][s]
                    && advance(p, &weights[i]) == s
            })
            .ok_or_else(|| Error::Internal("cover dp backtrack failed".into()))?;
        items.push(i);
        s = prev;
    }
    debug_assert_eq!(s, 0);
    items.reverse();
    Ok(Some(CoverChoice {
        cost: cur[goal],
        items,
    }))
}

fn knapsack_parts(fcp: &FcpInstance) -> Result<(&[u64], u64)> {
    match &fcp.constraint {
        FacilityConstraint::Knapsack { costs, budget } => Ok((costs, *budget)),
        _ => Err(Error::ConstraintMismatch(
            "knapsack solver needs a knapsack constraint",
        )),
    }
}

/// η(u) = min κ(H) over H ∋ u with the attaining set (lowest id on ties).
pub fn cheapest_sets(fcp: &FcpInstance, costs: &[u64]) -> Vec<Option<(u64, usize)>> {
    let mut best: Vec<Option<(u64, usize)>> = vec![None; fcp.n_elements()];
    for (h, set) in fcp.sets.iter().enumerate() {
        for &u in set {
            if best[u].is_none_or(|(c, _)| costs[h] < c) {
                best[u] = Some((costs[h], h));
            }
        }
    }
    best
}

/// Optimum of the η-cost binary program, ignoring the budget.
pub fn min_cover_cost(fcp: &FcpInstance) -> Result<Option<u64>> {
    let (costs, _) = knapsack_parts(fcp)?;
    let eta: Vec<Option<u64>> = cheapest_sets(fcp, costs)
        .into_iter()
        .map(|b| b.map(|(c, _)| c))
        .collect();
    Ok(cover_dp(&fcp.weights, &eta, &fcp.requirements)?.map(|c| c.cost))
}

/// Picks every element whose cheapest containing set the η-cost program
/// selects. With the promise this never fails and stays within budget.
pub fn solve_fcp_knapsack(fcp: &FcpInstance) -> Result<Option<FcpSolution>> {
    let (costs, budget) = knapsack_parts(fcp)?;
    let cheapest = cheapest_sets(fcp, costs);
    let eta: Vec<Option<u64>> = cheapest.iter().map(|b| b.map(|(c, _)| c)).collect();
    let Some(choice) = cover_dp(&fcp.weights, &eta, &fcp.requirements)? else {
        return Ok(None);
    };
    if choice.cost > budget {
        return Ok(None);
    }
    let mut sets: Vec<usize> = choice
        .items
        .iter()
        .map(|&u| cheapest[u].expect("selected elements are priced").1)
        .collect();
    sets.sort_unstable();
    sets.dedup();
    let cost = sets.iter().map(|&h| costs[h]).sum();
    let covered = fcp.union_weight(&sets);
    debug_assert!(fcp.meets_requirements(&covered));
    Ok(Some(FcpSolution {
        sets,
        covered,
        cost: Some(cost),
    }))
}

/// Dispatches on the constraint kind.
pub fn solve_fcp(fcp: &FcpInstance, seed: u64, reps: u32) -> Result<Option<FcpSolution>> {
    match fcp.constraint {
        FacilityConstraint::Knapsack { .. } => solve_fcp_knapsack(fcp),
        FacilityConstraint::LinearMatroid { .. } => {
            crate::linmat::solve_fcp_linear_matroid(fcp, seed, reps)
        }
    }
}

pub const BRUTE_FORCE_SET_LIMIT: usize = 15;
pub const BRUTE_FORCE_ELEMENT_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FcpBruteForce {
    /// Smallest (then lowest-mask) feasible covering family.
    pub solution: Option<Vec<usize>>,
    /// Representatives may repeat across sets; each set contributes once.
    pub promise_holds: bool,
    /// Same, but representatives must be pairwise distinct.
    pub distinct_promise_holds: bool,
}

fn mask_members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Exhaustive check of both a covering family and the promise.
pub fn brute_force_fcp(fcp: &FcpInstance) -> Result<FcpBruteForce> {
    let n = fcp.n_sets();
    if n > BRUTE_FORCE_SET_LIMIT {
        return Err(Error::SizeLimitExceeded {
            what: "sets",
            size: n,
            limit: BRUTE_FORCE_SET_LIMIT,
        });
    }
    let mut solution: Option<Vec<usize>> = None;
    for mask in 0u64..1 << n {
        let sets = mask_members(mask, n);
        if solution.as_ref().is_some_and(|s| s.len() <= sets.len()) {
            continue;
        }
        if fcp.is_solution(&sets)? {
            solution = Some(sets);
        }
    }

    // only Pareto-maximal representatives can matter
    let reps: Vec<Vec<usize>> = fcp
        .sets
        .iter()
        .map(|set| {
            let mut keep: Vec<usize> = Vec::new();
            for &u in set {
                let wu = &fcp.weights[u];
                let dominated = set.iter().any(|&v| {
                    let wv = &fcp.weights[v];
                    v != u && wv.iter().zip(wu).all(|(a, b)| a >= b) && (wv != wu || v < u)
                });
                if !dominated {
                    keep.push(u);
                }
            }
            keep
        })
        .collect();
    let mut chosen = Vec::new();
    let acc = vec![0u64; fcp.gamma()];
    let promise_holds = promise_dfs(fcp, &reps, 0, &mut chosen, acc.clone())?;
    let mut used = vec![false; fcp.n_elements()];
    let distinct_promise_holds =
        promise_holds && distinct_dfs(fcp, 0, &mut chosen, &mut used, acc)?;
    Ok(FcpBruteForce {
        solution,
        promise_holds,
        distinct_promise_holds,
    })
}

fn distinct_dfs(
    fcp: &FcpInstance,
    i: usize,
    chosen: &mut Vec<usize>,
    used: &mut [bool],
    acc: Vec<u64>,
) -> Result<bool> {
    if fcp.meets_requirements(&acc) {
        return Ok(true);
    }
    if i == fcp.n_sets() {
        return Ok(false);
    }
    chosen.push(i);
    if fcp.constraint.is_feasible(chosen)? {
        for &u in &fcp.sets[i] {
            if used[u] {
                continue;
            }
            used[u] = true;
            let next: Vec<u64> = acc
                .iter()
                .zip(&fcp.weights[u])
                .map(|(a, w)| a + w)
                .collect();
            let hit = distinct_dfs(fcp, i + 1, chosen, used, next)?;
            used[u] = false;
            if hit {
                chosen.pop();
                return Ok(true);
            }
        }
    }
    chosen.pop();
    distinct_dfs(fcp, i + 1, chosen, used, acc)
}

fn promise_dfs(
    fcp: &FcpInstance,
    reps: &[Vec<usize>],
    i: usize,
    chosen: &mut Vec<usize>,
    acc: Vec<u64>,
) -> Result<bool> {
    if fcp.meets_requirements(&acc) {
        return Ok(true);
    }
    if i == fcp.n_sets() {
        return Ok(false);
    }
    if !reps[i].is_empty() {
        chosen.push(i);
        if fcp.constraint.is_feasible(chosen)? {
            for &u in &reps[i] {
                let next: Vec<u64> = acc
                    .iter()
                    .zip(&fcp.weights[u])
                    .zip(&fcp.requirements)
                    .map(|((a, w), m)| (a + w).min(*m))
                    .collect();
                if promise_dfs(fcp, reps, i + 1, chosen, next)? {
                    chosen.pop();
                    return Ok(true);
                }
            }
        }
        chosen.pop();
    }
    promise_dfs(fcp, reps, i + 1, chosen, acc)
}

/// Minimum of the η-cost binary program by enumerating every z.
pub fn brute_force_min_cover_cost(fcp: &FcpInstance) -> Result<Option<u64>> {
    let (costs, _) = knapsack_parts(fcp)?;
    let n = fcp.n_elements();
    if n > BRUTE_FORCE_ELEMENT_LIMIT {
        return Err(Error::SizeLimitExceeded {
            what: "elements",
            size: n,
            limit: BRUTE_FORCE_ELEMENT_LIMIT,
        });
    }
    let eta = cheapest_sets(fcp, costs);
    let mut best: Option<u64> = None;
    'masks: for mask in 0u64..1 << n {
        let mut cost = 0u64;
        let members = mask_members(mask, n);
        for &u in &members {
            match eta[u] {
                Some((c, _)) => cost += c,
                None => continue 'masks,
            }
        }
        if best.is_some_and(|b| b <= cost) {
            continue;
        }
        if fcp.meets_requirements(&fcp.weight_of(&members)) {
            best = Some(cost);
        }
    }
    Ok(best)
}
