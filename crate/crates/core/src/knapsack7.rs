//! Seven-approximation for colorful knapsack supplier by exhaustive guessing.
//!
//! For a radius guess r the residual instance shrinks through four phases:
//! expensive-pair guessing (opened at 5r), per-color gain guessing (3r),
//! dense clusters solved by a cover DP (5r), and a flower LP rounded to at
//! most γ fractional coordinates on the sparse rest (7r).

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcp::cover_dp;
use crate::lp::{rat_u, LinearProgram, LpOutcome, Rational, Relation};
use crate::model::{
    check_solution, radius_schedule, ColorfulSpace, SupplierInstance, SupplierSolution,
};

pub const APPROX_FACTOR: u64 = 7;

/// One (f, c) pair per guessed facility, grouped into per-color blocks.
pub type Phase1Guess = Vec<Vec<(usize, usize)>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseState {
    pub radius: u64,
    /// Residual clients, ascending.
    pub clients: Vec<usize>,
    /// Residual facilities, ascending.
    pub facilities: Vec<usize>,
    pub requirements: Vec<u64>,
    pub budget: u64,
    /// Opened at 5r.
    pub s_kappa: Vec<usize>,
    /// Opened at 3r.
    pub s_w: Vec<usize>,
    /// Opened at 5r.
    pub s_d: Vec<usize>,
    /// Opened at 7r.
    pub s_s: Vec<usize>,
    pub sigma: u64,
    pub tau: Vec<u64>,
    /// Gains in guess order, one list per color block.
    pub gains: Vec<Vec<u64>>,
    pub expensive_guessed: Vec<usize>,
    pub removed_region: Vec<usize>,
}

impl PhaseState {
    pub fn initial(instance: &SupplierInstance, r: u64) -> Result<Self> {
        let (_, budget) = knapsack_of(instance)?;
        let g = instance.gamma();
        Ok(Self {
            radius: r,
            clients: (0..instance.space.n_clients()).collect(),
            facilities: (0..instance.space.n_facilities()).collect(),
            requirements: instance.requirements.clone(),
            budget,
            s_kappa: Vec::new(),
            s_w: Vec::new(),
            s_d: Vec::new(),
            s_s: Vec::new(),
            sigma: 0,
            tau: vec![0; g],
            gains: vec![Vec::new(); g],
            expensive_guessed: Vec::new(),
            removed_region: Vec::new(),
        })
    }

    /// Union of all opened facilities, ascending.
    pub fn opened(&self) -> Vec<usize> {
        let mut all: Vec<usize> = [&self.s_kappa, &self.s_w, &self.s_d, &self.s_s]
            .into_iter()
            .flatten()
            .copied()
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    fn has_client(&self, c: usize) -> bool {
        self.clients.binary_search(&c).is_ok()
    }

    fn has_facility(&self, f: usize) -> bool {
        self.facilities.binary_search(&f).is_ok()
    }
}

fn knapsack_of(instance: &SupplierInstance) -> Result<(&[u64], u64)> {
    instance.knapsack().ok_or(Error::ConstraintMismatch(
        "knapsack7 requires a knapsack constraint",
    ))
}

fn ball_clients(space: &ColorfulSpace, within: &[usize], f: usize, r: u64) -> Vec<usize> {
    within
        .iter()
        .copied()
        .filter(|&c| space.client_facility(c, f) <= r)
        .collect()
}

fn ball_facilities(space: &ColorfulSpace, within: &[usize], c: usize, r: u64) -> Vec<usize> {
    within
        .iter()
        .copied()
        .filter(|&f| space.client_facility(c, f) <= r)
        .collect()
}

fn covered_by(space: &ColorfulSpace, within: &[usize], centers: &[usize], r: u64) -> Vec<usize> {
    within
        .iter()
        .copied()
        .filter(|&c| centers.iter().any(|&f| space.client_facility(c, f) <= r))
        .collect()
}

fn minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    let drop: BTreeSet<usize> = b.iter().copied().collect();
    a.iter().copied().filter(|x| !drop.contains(x)).collect()
}

fn subtract_weights(m: &mut [u64], w: &[u64]) {
    for (mi, wi) in m.iter_mut().zip(w) {
        *mi = mi.saturating_sub(*wi);
    }
}

/// Flower(c) over the given residual clients and facilities.
fn flower_in(
    space: &ColorfulSpace,
    clients: &[usize],
    facilities: &[usize],
    c: usize,
    r: u64,
) -> Vec<usize> {
    let petals = ball_facilities(space, facilities, c, r);
    covered_by(space, clients, &petals, r)
}

fn gains_in(
    space: &ColorfulSpace,
    clients: &[usize],
    facilities: &[usize],
    f: usize,
    c: usize,
    r: u64,
) -> Vec<u64> {
    let flower = flower_in(space, clients, facilities, c, r);
    space.weight_of_set(
        flower
            .into_iter()
            .filter(|&b| space.client_facility(b, f) > r),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowerGain {
    pub flower: Vec<usize>,
    pub gains: Vec<u64>,
}

/// Flower(c) and gain_l(f, c) = w_l(Flower(c) \ B_C(f, r)) on the full space.
pub fn flower_gain(space: &ColorfulSpace, f: usize, c: usize, r: u64) -> Result<FlowerGain> {
    if f >= space.n_facilities() {
        return Err(Error::UnknownFacility(f));
    }
    if c >= space.n_clients() {
        return Err(Error::Shape(format!("client index {c} out of range")));
    }
    if space.client_facility(c, f) > r {
        return Err(Error::FacilityTooFar {
            facility: f,
            client: c,
        });
    }
    let clients: Vec<usize> = (0..space.n_clients()).collect();
    let facilities: Vec<usize> = (0..space.n_facilities()).collect();
    Ok(FlowerGain {
        flower: flower_in(space, &clients, &facilities, c, r),
        gains: gains_in(space, &clients, &facilities, f, c, r),
    })
}

/// Expensive-pair guessing from the initial state at radius r.
///
/// Each pair (e, s) must be distinct facilities outside the region removed so
/// far with d(e, s) <= 4r. σ is the cheapest guessed e when γ pairs are given
/// and 0 otherwise.
pub fn phase0_apply(
    instance: &SupplierInstance,
    r: u64,
    guess: &[(usize, usize)],
) -> Result<PhaseState> {
    let (costs, _) = knapsack_of(instance)?;
    let space = &instance.space;
    let g = instance.gamma();
    let mut st = PhaseState::initial(instance, r)?;
    if guess.len() > g {
        return Err(Error::InconsistentGuess(format!(
            "{} pairs exceed gamma = {g}",
            guess.len()
        )));
    }
    let mut removed: BTreeSet<usize> = BTreeSet::new();
    for &(e, s) in guess {
        for x in [e, s] {
            if x >= space.n_facilities() {
                return Err(Error::UnknownFacility(x));
            }
            if removed.contains(&x) {
                return Err(Error::InconsistentGuess(format!(
                    "facility {x} already removed"
                )));
            }
        }
        if e == s {
            return Err(Error::InconsistentGuess(format!(
                "pair ({e}, {s}) is not two facilities"
            )));
        }
        if space.facility_facility(e, s) > 4 * r {
            return Err(Error::InconsistentGuess(format!(
                "pair ({e}, {s}) is well-separated"
            )));
        }
        st.s_kappa.push(s);
        st.expensive_guessed.push(e);
        removed.extend(ball_facilities_ff(space, &st.facilities, s, 4 * r));
    }
    st.sigma = if guess.len() == g {
        st.expensive_guessed
            .iter()
            .map(|&e| costs[e])
            .min()
            .unwrap_or(0)
    } else {
        0
    };
    let hit = covered_by(space, &st.clients, &st.s_kappa, 5 * r);
    subtract_weights(
        &mut st.requirements,
        &space.weight_of_set(hit.iter().copied()),
    );
    st.clients = minus(&st.clients, &hit);
    st.removed_region = removed.into_iter().collect();
    st.facilities = minus(&st.facilities, &st.removed_region);
    let spent = st
        .s_kappa
        .iter()
        .map(|&s| costs[s])
        .sum::<u64>()
        .checked_add((g as u64).saturating_mul(st.sigma))
        .ok_or(Error::RejectedBudget)?;
    st.budget = st.budget.checked_sub(spent).ok_or(Error::RejectedBudget)?;
    Ok(st)
}

fn ball_facilities_ff(
    space: &ColorfulSpace,
    within: &[usize],
    s: usize,
    radius: u64,
) -> Vec<usize> {
    within
        .iter()
        .copied()
        .filter(|&f| space.facility_facility(f, s) <= radius)
        .collect()
}

/// Per-color gain guessing on a phase-0 state.
///
/// Block l lists the guessed (f, c) pairs for color l in guess order; its
/// τ_l is the last gain when the block is full (3γ + 1 pairs) and 0 otherwise.
pub fn phase1_apply(
    instance: &SupplierInstance,
    state: &PhaseState,
    guess: &[Vec<(usize, usize)>],
) -> Result<PhaseState> {
    let (costs, _) = knapsack_of(instance)?;
    let space = &instance.space;
    let g = instance.gamma();
    let r = state.radius;
    let full = 3 * g + 1;
    if guess.len() > g {
        return Err(Error::InconsistentGuess(format!(
            "{} blocks exceed gamma = {g}",
            guess.len()
        )));
    }
    let mut st = state.clone();
    let mut used: BTreeSet<usize> = state.s_w.iter().copied().collect();
    for (l, block) in guess.iter().enumerate() {
        if block.len() > full {
            return Err(Error::InconsistentGuess(format!(
                "block {l} has more than {full} pairs"
            )));
        }
        let mut recorded = Vec::with_capacity(block.len());
        for &(f, c) in block {
            if f >= space.n_facilities() {
                return Err(Error::UnknownFacility(f));
            }
            if !state.has_facility(f) || used.contains(&f) {
                return Err(Error::InconsistentGuess(format!(
                    "facility {f} unavailable"
                )));
            }
            if costs[f] <= state.sigma {
                return Err(Error::InconsistentGuess(format!(
                    "facility {f} is not expensive"
                )));
            }
            if c >= space.n_clients() || !state.has_client(c) {
                return Err(Error::InconsistentGuess(format!("client {c} unavailable")));
            }
            if space.client_facility(c, f) > r {
                return Err(Error::InconsistentGuess(format!(
                    "facility {f} farther than r from client {c}"
                )));
            }
            recorded.push(gains_in(space, &state.clients, &state.facilities, f, c, r)[l]);
            used.insert(f);
            st.s_w.push(f);
        }
        st.tau[l] = if block.len() == full {
            *recorded.last().unwrap_or(&0)
        } else {
            0
        };
        st.gains[l] = recorded;
    }
    let added = &st.s_w[state.s_w.len()..];
    let gained = covered_by(space, &state.clients, added, r);
    subtract_weights(
        &mut st.requirements,
        &space.weight_of_set(gained.iter().copied()),
    );
    let stretched = covered_by(space, &state.clients, added, 3 * r);
    st.clients = minus(&state.clients, &stretched);
    st.facilities = minus(&state.facilities, added);
    let spent: u64 = added.iter().map(|&f| costs[f]).sum();
    st.budget = st.budget.checked_sub(spent).ok_or(Error::RejectedBudget)?;
    Ok(st)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub clients: Vec<usize>,
    pub core: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseDecomposition {
    pub clusters: Vec<Cluster>,
    pub dense_clients: Vec<usize>,
    pub dense_facilities: Vec<usize>,
    /// E over the phase-1 facilities.
    pub expensive: Vec<usize>,
    /// E_4: facilities whose 4r-ball inside the phase-1 facilities lies in E.
    pub expensive4: Vec<usize>,
    /// Facilities of the phase-1 state.
    pub facilities: Vec<usize>,
}

/// Dense clusters of a phase-1 state. Dense candidates are scanned by lowest
/// id; densities and cores are measured on clients not yet in a cluster.
pub fn dense_decomposition(
    instance: &SupplierInstance,
    state: &PhaseState,
) -> Result<DenseDecomposition> {
    let (costs, _) = knapsack_of(instance)?;
    let space = &instance.space;
    let r = state.radius;
    let fs = &state.facilities;
    let expensive: Vec<usize> = fs
        .iter()
        .copied()
        .filter(|&f| costs[f] > state.sigma)
        .collect();
    let expensive4: Vec<usize> = expensive
        .iter()
        .copied()
        .filter(|&f| {
            ball_facilities_ff(space, fs, f, 4 * r)
                .iter()
                .all(|&g| costs[g] > state.sigma)
        })
        .collect();
    let mut in_cd = vec![false; space.n_clients()];
    let mut in_fd = vec![false; space.n_facilities()];
    let mut clusters = Vec::new();
    for l in 0..instance.gamma() {
        loop {
            let avail: Vec<usize> = state
                .clients
                .iter()
                .copied()
                .filter(|&c| !in_cd[c])
                .collect();
            let dense = expensive4.iter().copied().find(|&f| {
                let w = space.weight_of_set(ball_clients(space, &avail, f, r));
                w[l] > 2 * state.tau[l]
            });
            let Some(f) = dense else { break };
            let ball_f = ball_clients(space, &avail, f, r);
            let core: Vec<usize> = fs
                .iter()
                .copied()
                .filter(|&g| {
                    let shared = ball_f
                        .iter()
                        .copied()
                        .filter(|&c| space.client_facility(c, g) <= r);
                    space
                        .weight_of_set(shared)
                        .iter()
                        .zip(&state.tau)
                        .any(|(w, t)| w > t)
                })
                .collect();
            let cluster = covered_by(space, &avail, &core, r);
            let new_core: Vec<usize> = core.iter().copied().filter(|&g| !in_fd[g]).collect();
            for &c in &cluster {
                in_cd[c] = true;
            }
            for &g in &new_core {
                in_fd[g] = true;
            }
            clusters.push(Cluster {
                clients: cluster,
                core: new_core,
            });
        }
    }
    Ok(DenseDecomposition {
        clusters,
        dense_clients: (0..space.n_clients()).filter(|&c| in_cd[c]).collect(),
        dense_facilities: (0..space.n_facilities()).filter(|&f| in_fd[f]).collect(),
        expensive,
        expensive4,
        facilities: fs.clone(),
    })
}

/// Cheapest cluster selection covering `targets`; opens the cheapest core
/// facility (lowest id on ties) of each chosen cluster. `None` when the
/// targets are unreachable.
pub fn solve_dense(
    instance: &SupplierInstance,
    decomposition: &DenseDecomposition,
    targets: &[u64],
) -> Result<Option<Vec<usize>>> {
    let (costs, _) = knapsack_of(instance)?;
    let space = &instance.space;
    let mut weights = Vec::with_capacity(decomposition.clusters.len());
    let mut item_costs = Vec::with_capacity(decomposition.clusters.len());
    let mut openers = Vec::with_capacity(decomposition.clusters.len());
    for u in &decomposition.clusters {
        weights.push(space.weight_of_set(u.clients.iter().copied()));
        let best = u.core.iter().copied().min_by_key(|&f| (costs[f], f));
        item_costs.push(best.map(|f| costs[f]));
        openers.push(best);
    }
    let Some(choice) = cover_dp(&weights, &item_costs, targets)? else {
        return Ok(None);
    };
    let mut opened: Vec<usize> = choice.items.iter().filter_map(|&i| openers[i]).collect();
    opened.sort_unstable();
    opened.dedup();
    Ok(Some(opened))
}

/// Removes the dense part from a phase-1 state after opening `s_d`.
pub fn apply_dense(
    instance: &SupplierInstance,
    state: &PhaseState,
    decomposition: &DenseDecomposition,
    s_d: &[usize],
) -> Result<PhaseState> {
    let (costs, _) = knapsack_of(instance)?;
    let space = &instance.space;
    let mut st = state.clone();
    let hit = covered_by(space, &decomposition.dense_clients, s_d, 5 * state.radius);
    subtract_weights(&mut st.requirements, &space.weight_of_set(hit));
    st.clients = minus(&state.clients, &decomposition.dense_clients);
    st.facilities = minus(&state.facilities, &decomposition.dense_facilities);
    let spent: u64 = s_d.iter().map(|&f| costs[f]).sum();
    st.budget = st.budget.checked_sub(spent).ok_or(Error::RejectedBudget)?;
    st.s_d = s_d.to_vec();
    Ok(st)
}

/// Output of the flower preparation on an LP point.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowerLpPoint {
    /// Representatives in selection order.
    pub q: Vec<usize>,
    /// D_c per representative; pairwise disjoint.
    pub d: Vec<Vec<usize>>,
    /// Cheapest facility cost within r of each representative.
    pub eta: Vec<u64>,
    pub z: Vec<Rational>,
    /// LP client values, indexed by client.
    pub x: Vec<Rational>,
    /// Indexed by client; zero outside the flowers.
    pub x_bar: Vec<Rational>,
}

/// Greedy flower preparation: repeatedly take the remaining client with the
/// largest x (lowest id on ties), set z = min(1, y(B_F(c, r))) and carve out
/// its flower. `x` and `y` are indexed by client and facility.
pub fn flower_preparation(
    space: &ColorfulSpace,
    costs: &[u64],
    clients: &[usize],
    facilities: &[usize],
    x: &[Rational],
    y: &[Rational],
    r: u64,
) -> Result<FlowerLpPoint> {
    let mut remaining: Vec<usize> = clients.to_vec();
    let mut point = FlowerLpPoint {
        q: Vec::new(),
        d: Vec::new(),
        eta: Vec::new(),
        z: Vec::new(),
        x: x.to_vec(),
        x_bar: vec![Rational::zero(); space.n_clients()],
    };
    loop {
        let mut best: Option<usize> = None;
        for &b in &remaining {
            if x[b].is_positive() && best.is_none_or(|c| x[b] > x[c]) {
                best = Some(b);
            }
        }
        let Some(c) = best else { break };
        let petals = ball_facilities(space, facilities, c, r);
        let eta = petals.iter().map(|&f| costs[f]).min().ok_or_else(|| {
            Error::Internal(format!(
                "client {c} has positive x but no facility within r"
            ))
        })?;
        let mass: Rational = petals.iter().map(|&f| y[f].clone()).sum();
        let z = if mass > Rational::one() {
            Rational::one()
        } else {
            mass
        };
        let mut dc = covered_by(space, &remaining, &petals, r);
        if !dc.contains(&c) {
            dc.push(c);
            dc.sort_unstable();
        }
        for &b in &dc {
            point.x_bar[b] = z.clone();
        }
        remaining = minus(&remaining, &dc);
        point.q.push(c);
        point.d.push(dc);
        point.eta.push(eta);
        point.z.push(z);
    }
    Ok(point)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOutcome {
    pub s_s: Vec<usize>,
    pub point: Option<FlowerLpPoint>,
    /// Optimal vertex of the flower polytope, aligned with `point.q`.
    pub vertex: Vec<Rational>,
    pub fractional: usize,
}

/// LP-based solution on the sparse residual. `None` discards the guess.
pub fn solve_sparse(
    instance: &SupplierInstance,
    state: &PhaseState,
    decomposition: &DenseDecomposition,
) -> Result<Option<SparseOutcome>> {
    let (costs, _) = knapsack_of(instance)?;
    let space = &instance.space;
    let g = instance.gamma();
    let r = state.radius;
    if state.requirements.iter().all(|&m| m == 0) {
        return Ok(Some(SparseOutcome {
            s_s: Vec::new(),
            point: None,
            vertex: Vec::new(),
            fractional: 0,
        }));
    }
    let in_e4 = {
        let mut mask = vec![false; space.n_facilities()];
        for &f in &decomposition.expensive4 {
            mask[f] = true;
        }
        mask
    };
    let inside_e4 = |c: usize| {
        ball_facilities(space, &state.facilities, c, r)
            .iter()
            .all(|&f| in_e4[f])
    };

    // variables: x_c for eligible residual clients, then y_f for residual facilities
    let mut x_var = vec![None; space.n_clients()];
    let mut x_clients = Vec::new();
    for &c in &state.clients {
        if ball_facilities(space, &state.facilities, c, r).is_empty() {
            continue;
        }
        if inside_e4(c) {
            let fw = space.weight_of_set(flower_in(space, &state.clients, &state.facilities, c, r));
            if fw.iter().zip(&state.tau).any(|(w, t)| *w > 3 * t) {
                continue;
            }
        }
        x_var[c] = Some(x_clients.len());
        x_clients.push(c);
    }
    let nx = x_clients.len();
    let ny = state.facilities.len();
    let mut lp = LinearProgram::new(nx + ny);
    for (j, &f) in state.facilities.iter().enumerate() {
        lp.objective[nx + j] = rat_u(costs[f]);
    }
    lp.add_row(
        state
            .facilities
            .iter()
            .enumerate()
            .map(|(j, &f)| (nx + j, rat_u(costs[f])))
            .collect(),
        Relation::Le,
        rat_u(state.budget),
    );
    for (i, &c) in x_clients.iter().enumerate() {
        let mut terms = vec![(i, Rational::one())];
        for (j, &f) in state.facilities.iter().enumerate() {
            if space.client_facility(c, f) <= r {
                terms.push((nx + j, -Rational::one()));
            }
        }
        lp.add_row(terms, Relation::Le, Rational::zero());
    }
    for (l, &m) in state.requirements.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let terms = x_clients
            .iter()
            .enumerate()
            .filter(|(_, &c)| space.weight(c, l) > 0)
            .map(|(i, &c)| (i, rat_u(space.weight(c, l))))
            .collect();
        lp.add_row(terms, Relation::Ge, rat_u(m));
    }
    for v in 0..nx + ny {
        lp.add_upper_bound(v, Rational::one());
    }
    let LpOutcome::Optimal { x: sol, .. } = lp.solve() else {
        return Ok(None);
    };
    let mut x = vec![Rational::zero(); space.n_clients()];
    for (i, &c) in x_clients.iter().enumerate() {
        x[c] = sol[i].clone();
    }
    let mut y = vec![Rational::zero(); space.n_facilities()];
    for (j, &f) in state.facilities.iter().enumerate() {
        y[f] = sol[nx + j].clone();
    }
    debug_assert!(x_var.iter().flatten().count() == nx);

    let point = flower_preparation(space, costs, &state.clients, &state.facilities, &x, &y, r)?;
    let nq = point.q.len();
    let mut flower_lp = LinearProgram::new(nq);
    flower_lp.objective = point.eta.iter().map(|&e| rat_u(e)).collect();
    let dw: Vec<Vec<u64>> = point
        .d
        .iter()
        .map(|dc| space.weight_of_set(dc.iter().copied()))
        .collect();
    for (l, &m) in state.requirements.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let terms = (0..nq)
            .filter(|&i| dw[i][l] > 0)
            .map(|i| (i, rat_u(dw[i][l])))
            .collect();
        flower_lp.add_row(terms, Relation::Ge, rat_u(m));
    }
    for i in 0..nq {
        flower_lp.add_upper_bound(i, Rational::one());
    }
    let LpOutcome::Optimal { x: vertex, value } = flower_lp.solve() else {
        return Err(Error::Internal(
            "flower polytope empty for a feasible LP point".into(),
        ));
    };
    if value > rat_u(state.budget) {
        return Err(Error::Internal(
            "flower vertex exceeds the residual budget".into(),
        ));
    }
    let fractional = vertex.iter().filter(|v| !v.is_integer()).count();
    if fractional > g {
        return Err(Error::Internal(format!(
            "flower vertex has {fractional} fractional entries, gamma = {g}"
        )));
    }

    let mut in_e = vec![false; space.n_facilities()];
    for &f in &decomposition.expensive {
        in_e[f] = true;
    }
    let mut s_s = Vec::new();
    for (i, &c) in point.q.iter().enumerate() {
        if vertex[i].is_zero() {
            continue;
        }
        if vertex[i].is_one() {
            let cheapest = ball_facilities(space, &state.facilities, c, r)
                .into_iter()
                .min_by_key(|&f| (costs[f], f));
            s_s.extend(cheapest);
        } else if !inside_e4(c) {
            let Some(fc) = decomposition
                .facilities
                .iter()
                .copied()
                .find(|&f| !in_e[f] && space.client_facility(c, f) <= 5 * r)
            else {
                return Ok(None);
            };
            s_s.push(fc);
        }
    }
    s_s.sort_unstable();
    s_s.dedup();

    let spent: u64 = s_s.iter().map(|&f| costs[f]).sum();
    if spent
        > state
            .budget
            .saturating_add((g as u64).saturating_mul(state.sigma))
    {
        return Ok(None);
    }
    let got = space.weight_of_set(covered_by(space, &state.clients, &s_s, 7 * r));
    let short = got
        .iter()
        .zip(&state.requirements)
        .zip(&state.tau)
        .any(|((&w, &m), &t)| w < m.saturating_sub(3 * g as u64 * t));
    if short {
        return Ok(None);
    }
    Ok(Some(SparseOutcome {
        s_s,
        point: Some(point),
        vertex,
        fractional,
    }))
}

/// Every consistent phase-0 guess at radius r: the empty sequence first, then
/// ordered sequences of up to γ pairs in lexicographic order.
pub fn phase0_guesses(instance: &SupplierInstance, r: u64) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        space: &ColorfulSpace,
        r: u64,
        depth: usize,
        removed: &mut Vec<bool>,
        prefix: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        out.push(prefix.clone());
        if depth == 0 {
            return;
        }
        let nf = space.n_facilities();
        for e in 0..nf {
            for s in 0..nf {
                if e == s || removed[e] || removed[s] || space.facility_facility(e, s) > 4 * r {
                    continue;
                }
                let newly: Vec<usize> = (0..nf)
                    .filter(|&f| !removed[f] && space.facility_facility(f, s) <= 4 * r)
                    .collect();
                for &f in &newly {
                    removed[f] = true;
                }
                prefix.push((e, s));
                rec(space, r, depth - 1, removed, prefix, out);
                prefix.pop();
                for &f in &newly {
                    removed[f] = false;
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut removed = vec![false; instance.space.n_facilities()];
    rec(
        &instance.space,
        r,
        instance.gamma(),
        &mut removed,
        &mut Vec::new(),
        &mut out,
    );
    out
}

/// Every phase-1 guess for a phase-0 state. For each color the candidates
/// are unused expensive facilities with a client within r, each paired with
/// its gain-maximising client (lowest id on ties) and ordered by gain
/// descending; a block is any ordered subset of at most 3γ + 1 candidates.
pub fn phase1_guesses(instance: &SupplierInstance, state: &PhaseState) -> Result<Vec<Phase1Guess>> {
    let (costs, _) = knapsack_of(instance)?;
    let g = instance.gamma();
    let full = 3 * g + 1;
    let space = &instance.space;
    let r = state.radius;
    let mut out = Vec::new();
    let mut blocks: Phase1Guess = Vec::new();
    let mut used = vec![false; space.n_facilities()];

    #[allow(clippy::too_many_arguments)]
    fn per_color(
        space: &ColorfulSpace,
        costs: &[u64],
        state: &PhaseState,
        l: usize,
        g: usize,
        full: usize,
        r: u64,
        used: &mut Vec<bool>,
        blocks: &mut Phase1Guess,
        out: &mut Vec<Phase1Guess>,
    ) {
        if l == g {
            let mut trimmed = blocks.clone();
            while trimmed.last().is_some_and(|b| b.is_empty()) {
                trimmed.pop();
            }
            out.push(trimmed);
            return;
        }
        let mut cands: Vec<(u64, usize, usize)> = Vec::new();
        for &f in &state.facilities {
            if used[f] || costs[f] <= state.sigma {
                continue;
            }
            let best = ball_clients(space, &state.clients, f, r)
                .into_iter()
                .map(|c| {
                    (
                        gains_in(space, &state.clients, &state.facilities, f, c, r)[l],
                        c,
                    )
                })
                .min_by_key(|&(gain, c)| (std::cmp::Reverse(gain), c));
            if let Some((gain, c)) = best {
                cands.push((gain, f, c));
            }
        }
        cands.sort_by_key(|&(gain, f, _)| (std::cmp::Reverse(gain), f));
        let n = cands.len();
        for mask in 0u64..(1u64 << n) {
            if mask.count_ones() as usize > full {
                continue;
            }
            let block: Vec<(usize, usize)> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| (cands[i].1, cands[i].2))
                .collect();
            for &(f, _) in &block {
                used[f] = true;
            }
            blocks.push(block);
            per_color(space, costs, state, l + 1, g, full, r, used, blocks, out);
            if let Some(block) = blocks.pop() {
                for (f, _) in block {
                    used[f] = false;
                }
            }
        }
    }

    per_color(
        space,
        costs,
        state,
        0,
        g,
        full,
        r,
        &mut used,
        &mut blocks,
        &mut out,
    );
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Knapsack7Limits {
    /// Maximum number of guess compositions reaching the sparse phase.
    pub max_guesses: u64,
}

impl Default for Knapsack7Limits {
    fn default() -> Self {
        Self {
            max_guesses: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub sigma: u64,
    pub tau: Vec<u64>,
    pub dense_clusters: usize,
    pub lp_fractionals: usize,
    pub s_kappa: Vec<usize>,
    pub s_w: Vec<usize>,
    pub s_d: Vec<usize>,
    pub s_s: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Knapsack7Outcome {
    pub solution: SupplierSolution,
    pub radius_guess: u64,
    pub factor_bound: u64,
    pub guesses_tried: u64,
    pub phases: PhaseSummary,
}

/// Dense targets m^d in Π[0, m_l], lexicographic with the first color fastest.
fn target_grid(bounds: &[u64]) -> impl Iterator<Item = Vec<u64>> + '_ {
    let mut cur: Option<Vec<u64>> = Some(vec![0; bounds.len()]);
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = 0;
        loop {
            if i == next.len() {
                cur = None;
                break;
            }
            if next[i] < bounds[i] {
                next[i] += 1;
                cur = Some(next);
                break;
            }
            next[i] = 0;
            i += 1;
        }
        Some(out)
    })
}

fn try_radius(
    instance: &SupplierInstance,
    r: u64,
    limits: &Knapsack7Limits,
    tried: &mut u64,
) -> Result<Option<Knapsack7Outcome>> {
    for p0 in phase0_guesses(instance, r) {
        let st0 = match phase0_apply(instance, r, &p0) {
            Ok(s) => s,
            Err(Error::RejectedBudget) => continue,
            Err(e) => return Err(e),
        };
        let mut seen_states = BTreeSet::new();
        for p1 in phase1_guesses(instance, &st0)? {
            let st1 = match phase1_apply(instance, &st0, &p1) {
                Ok(s) => s,
                Err(Error::RejectedBudget) => continue,
                Err(e) => return Err(e),
            };
            if !seen_states.insert((
                st1.s_w.iter().copied().collect::<BTreeSet<_>>(),
                st1.tau.clone(),
            )) {
                continue;
            }
            let dec = dense_decomposition(instance, &st1)?;
            let mut seen_sd = BTreeSet::new();
            for md in target_grid(&st1.requirements) {
                let Some(s_d) = solve_dense(instance, &dec, &md)? else {
                    continue;
                };
                if !seen_sd.insert(s_d.clone()) {
                    continue;
                }
                let st2 = match apply_dense(instance, &st1, &dec, &s_d) {
                    Ok(s) => s,
                    Err(Error::RejectedBudget) => continue,
                    Err(e) => return Err(e),
                };
                *tried += 1;
                if *tried > limits.max_guesses {
                    return Err(Error::GuessSpaceExceeded(limits.max_guesses));
                }
                let Some(sparse) = solve_sparse(instance, &st2, &dec)? else {
                    continue;
                };
                let mut st3 = st2;
                st3.s_s = sparse.s_s.clone();
                let solution = check_solution(instance, &st3.opened(), APPROX_FACTOR * r)?;
                if solution.feasible {
                    return Ok(Some(Knapsack7Outcome {
                        solution,
                        radius_guess: r,
                        factor_bound: APPROX_FACTOR,
                        guesses_tried: *tried,
                        phases: PhaseSummary {
                            sigma: st3.sigma,
                            tau: st3.tau.clone(),
                            dense_clusters: dec.clusters.len(),
                            lp_fractionals: sparse.fractional,
                            s_kappa: st3.s_kappa.clone(),
                            s_w: st3.s_w.clone(),
                            s_d: st3.s_d.clone(),
                            s_s: st3.s_s.clone(),
                        },
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// First feasible composition over ascending radius guesses, in guess order.
/// `None` when no composition is feasible at any radius.
pub fn solve_knapsack7(
    instance: &SupplierInstance,
    limits: &Knapsack7Limits,
) -> Result<Option<Knapsack7Outcome>> {
    knapsack_of(instance)?;
    let mut tried = 0u64;
    for r in radius_schedule(&instance.space) {
        if let Some(out) = try_radius(instance, r, limits, &mut tried)? {
            return Ok(Some(out));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::rat;
    use crate::model::fixtures::{tiny1_knapsack, tiny1_space};
    use crate::model::FacilityConstraint;
    use proptest::prelude::*;

    fn with_budget(budget: u64) -> SupplierInstance {
        let mut inst = tiny1_knapsack();
        inst.constraint = FacilityConstraint::Knapsack {
            costs: vec![1, 1],
            budget,
        };
        inst
    }

    #[test]
    fn flower_of_isolated_client() {
        let g = flower_gain(&tiny1_space(), 0, 0, 1).unwrap();
        assert_eq!(g.flower, vec![0, 1]);
        assert_eq!(g.gains, vec![0]);
        assert!(matches!(
            flower_gain(&tiny1_space(), 1, 0, 1),
            Err(Error::FacilityTooFar {
                facility: 1,
                client: 0
            })
        ));
    }

    #[test]
    fn co_located_facilities_gain_nothing() {
        let space = ColorfulSpace::new(
            vec!["a".into(), "b".into()],
            vec!["f".into(), "g".into()],
            vec![
                vec![0, 1, 1, 1],
                vec![1, 0, 1, 1],
                vec![1, 1, 0, 0],
                vec![1, 1, 0, 0],
            ],
            1,
            vec![vec![1], vec![2]],
        )
        .unwrap();
        for f in 0..2 {
            assert_eq!(flower_gain(&space, f, 0, 1).unwrap().gains, vec![0]);
        }
    }

    #[test]
    fn phase0_empty_guess_is_identity() {
        let inst = tiny1_knapsack();
        let st = phase0_apply(&inst, 1, &[]).unwrap();
        assert_eq!(st, PhaseState::initial(&inst, 1).unwrap());
        assert_eq!(st.sigma, 0);
    }

    #[test]
    fn phase0_pair_removes_region() {
        // with budget 1 the pair's γσ charge overdraws the budget
        assert!(matches!(
            phase0_apply(&tiny1_knapsack(), 1, &[(1, 0)]),
            Err(Error::RejectedBudget)
        ));
        let st = phase0_apply(&with_budget(2), 1, &[(1, 0)]).unwrap();
        assert_eq!(st.s_kappa, vec![0]);
        assert_eq!(st.sigma, 1);
        assert_eq!(st.removed_region, vec![0, 1]);
        assert!(st.clients.is_empty());
        assert!(st.facilities.is_empty());
        assert_eq!(st.requirements, vec![0]);
        assert_eq!(st.budget, 0);
    }

    #[test]
    fn phase0_rejects_separated_pair() {
        // d(f1, f2) = 4 > 4·0
        assert!(matches!(
            phase0_apply(&with_budget(2), 0, &[(1, 0)]),
            Err(Error::InconsistentGuess(_))
        ));
    }

    #[test]
    fn phase1_single_pair() {
        let inst = tiny1_knapsack();
        let st0 = phase0_apply(&inst, 1, &[]).unwrap();
        let st1 = phase1_apply(&inst, &st0, &[vec![(1, 2)]]).unwrap();
        assert_eq!(st1.s_w, vec![1]);
        assert_eq!(st1.gains, vec![vec![0]]);
        // block shorter than 3γ + 1
        assert_eq!(st1.tau, vec![0]);
        assert_eq!(st1.requirements, vec![1]);
        assert_eq!(st1.clients, vec![0, 1]);
        assert_eq!(st1.facilities, vec![0]);
        assert_eq!(st1.budget, 0);
    }

    #[test]
    fn phase1_needs_expensive_facilities() {
        let mut inst = tiny1_knapsack();
        inst.constraint = FacilityConstraint::Knapsack {
            costs: vec![0, 0],
            budget: 1,
        };
        let st0 = phase0_apply(&inst, 1, &[]).unwrap();
        assert_eq!(
            phase1_guesses(&inst, &st0).unwrap(),
            vec![Vec::<Vec<(usize, usize)>>::new()]
        );
        assert!(phase1_apply(&inst, &st0, &[vec![(0, 0)]]).is_err());
    }

    #[test]
    fn dense_cluster_around_isolated_facility() {
        let inst = tiny1_knapsack();
        let st = phase0_apply(&inst, 1, &[]).unwrap();
        let dec = dense_decomposition(&inst, &st).unwrap();
        // f1 and f2 are 4 apart, both expensive; f1 ball weight 2 > 0
        assert_eq!(dec.expensive4, vec![0, 1]);
        assert_eq!(
            dec.clusters[0],
            Cluster {
                clients: vec![0, 1],
                core: vec![0]
            }
        );
        assert_eq!(
            dec.clusters[1],
            Cluster {
                clients: vec![2],
                core: vec![1]
            }
        );
        assert_eq!(solve_dense(&inst, &dec, &[0]).unwrap(), Some(vec![]));
        assert_eq!(solve_dense(&inst, &dec, &[2]).unwrap(), Some(vec![0]));
        assert_eq!(solve_dense(&inst, &dec, &[3]).unwrap(), Some(vec![0, 1]));
        assert_eq!(solve_dense(&inst, &dec, &[4]).unwrap(), None);
    }

    #[test]
    fn no_dense_sets_with_high_threshold() {
        let inst = tiny1_knapsack();
        let mut st = phase0_apply(&inst, 1, &[]).unwrap();
        st.tau = vec![2];
        assert!(dense_decomposition(&inst, &st).unwrap().clusters.is_empty());
        st.tau = vec![0];
        st.sigma = 1;
        let dec = dense_decomposition(&inst, &st).unwrap();
        assert!(dec.expensive.is_empty() && dec.clusters.is_empty());
    }

    #[test]
    fn sparse_zero_requirements() {
        let mut inst = tiny1_knapsack();
        inst.requirements = vec![0];
        let st = phase0_apply(&inst, 1, &[]).unwrap();
        let dec = dense_decomposition(&inst, &st).unwrap();
        let out = solve_sparse(&inst, &st, &dec).unwrap().unwrap();
        assert!(out.s_s.is_empty());
    }

    #[test]
    fn sparse_integral_single_representative() {
        let inst = tiny1_knapsack();
        let st = phase0_apply(&inst, 1, &[]).unwrap();
        let mut dec = dense_decomposition(&inst, &st).unwrap();
        // treat everything as sparse
        dec.clusters.clear();
        dec.dense_clients.clear();
        dec.dense_facilities.clear();
        dec.expensive4.clear();
        let out = solve_sparse(&inst, &st, &dec).unwrap().unwrap();
        assert_eq!(out.s_s, vec![0]);
        assert_eq!(out.fractional, 0);
    }

    #[test]
    fn sparse_fractional_opens_cheap_neighbour() {
        // clients a (weight 2) near g, b (weight 1) near h; a cheap facility
        // k sits 2 from both. Requiring 1 with budget 1 and κ(g) = κ(h) = 2
        // makes the LP split; rounding opens k.
        let space = ColorfulSpace::new(
            vec!["a".into(), "b".into()],
            vec!["g".into(), "h".into(), "k".into()],
            vec![
                vec![0, 4, 1, 5, 2],
                vec![4, 0, 5, 1, 2],
                vec![1, 5, 0, 6, 3],
                vec![5, 1, 6, 0, 3],
                vec![2, 2, 3, 3, 0],
            ],
            1,
            vec![vec![2], vec![1]],
        )
        .unwrap();
        let inst = SupplierInstance::new(
            space,
            vec![1],
            FacilityConstraint::Knapsack {
                costs: vec![2, 2, 0],
                budget: 1,
            },
        )
        .unwrap();
        let mut st = PhaseState::initial(&inst, 1).unwrap();
        st.facilities = vec![0, 1];
        let dec = DenseDecomposition {
            clusters: vec![],
            dense_clients: vec![],
            dense_facilities: vec![],
            expensive: vec![0, 1],
            expensive4: vec![],
            facilities: vec![0, 1, 2],
        };
        let out = solve_sparse(&inst, &st, &dec).unwrap().unwrap();
        assert_eq!(out.fractional, 1);
        assert_eq!(out.vertex, vec![rat(1) / rat(2)]);
        assert_eq!(out.s_s, vec![2]);
    }

    #[test]
    fn tiny1_within_seven() {
        let out = solve_knapsack7(&tiny1_knapsack(), &Knapsack7Limits::default())
            .unwrap()
            .unwrap();
        assert!(out.solution.feasible);
        assert!(out.solution.radius <= 7);
        assert_eq!(out.factor_bound, 7);
    }

    #[test]
    fn zero_requirements_open_nothing() {
        let mut inst = tiny1_knapsack();
        inst.requirements = vec![0];
        let out = solve_knapsack7(&inst, &Knapsack7Limits::default())
            .unwrap()
            .unwrap();
        assert!(out.solution.centers.is_empty());
        assert_eq!(out.radius_guess, 0);
    }

    #[test]
    fn guess_limit_is_reported() {
        let err =
            solve_knapsack7(&tiny1_knapsack(), &Knapsack7Limits { max_guesses: 0 }).unwrap_err();
        assert!(matches!(err, Error::GuessSpaceExceeded(0)));
    }

    fn arb_instance() -> impl Strategy<Value = SupplierInstance> {
        (1usize..=5, 1usize..=4).prop_flat_map(|(nc, nf)| {
            (
                proptest::collection::vec(0u64..=12, nc + nf),
                proptest::collection::vec(0u64..=3, nc),
                proptest::collection::vec(0u64..=4, nf),
                0u64..=8,
                0u64..=6,
            )
                .prop_map(move |(pos, w, costs, budget, m)| {
                    let ids =
                        |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
                    let dist = pos
                        .iter()
                        .map(|a| pos.iter().map(|b| a.abs_diff(*b)).collect())
                        .collect();
                    let total: u64 = w.iter().sum();
                    SupplierInstance::new(
                        ColorfulSpace::new(
                            ids("c", nc),
                            ids("f", nf),
                            dist,
                            1,
                            w.iter().map(|&x| vec![x]).collect(),
                        )
                        .unwrap(),
                        vec![m.min(total)],
                        FacilityConstraint::Knapsack { costs, budget },
                    )
                    .unwrap()
                })
        })
    }

    fn le(a: &[u64], b: &[u64]) -> bool {
        a.iter().zip(b).all(|(x, y)| x <= y)
    }

    fn subset(a: &[usize], b: &[usize]) -> bool {
        a.iter().all(|x| b.contains(x))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn phases_shrink_and_flowers_partition(inst in arb_instance(), ri in 0usize..6) {
            let radii = radius_schedule(&inst.space);
            let r = radii[ri % radii.len()];
            let (costs, _) = inst.knapsack().unwrap();
            let init = PhaseState::initial(&inst, r).unwrap();
            for p0 in phase0_guesses(&inst, r) {
                let Ok(st0) = phase0_apply(&inst, r, &p0) else { continue };
                prop_assert!(st0.budget <= init.budget && le(&st0.requirements, &init.requirements));
                prop_assert!(subset(&st0.clients, &init.clients) && subset(&st0.facilities, &init.facilities));
                for p1 in phase1_guesses(&inst, &st0).unwrap() {
                    let Ok(st1) = phase1_apply(&inst, &st0, &p1) else { continue };
                    prop_assert!(st1.budget <= st0.budget && le(&st1.requirements, &st0.requirements));
                    prop_assert!(subset(&st1.clients, &st0.clients) && subset(&st1.facilities, &st0.facilities));
                    let dec = dense_decomposition(&inst, &st1).unwrap();
                    for u in &dec.clusters {
                        for &g in &u.core {
                            for &c in &u.clients {
                                prop_assert!(inst.space.client_facility(c, g) <= 5 * r);
                            }
                        }
                    }
                    for md in target_grid(&st1.requirements) {
                        let Some(s_d) = solve_dense(&inst, &dec, &md).unwrap() else { continue };
                        let Ok(st2) = apply_dense(&inst, &st1, &dec, &s_d) else { continue };
                        prop_assert!(st2.budget <= st1.budget && le(&st2.requirements, &st1.requirements));
                        prop_assert!(st2.clients.iter().all(|c| !dec.dense_clients.contains(c)));
                        let sparse = solve_sparse(&inst, &st2, &dec).unwrap();
                        if let Some(SparseOutcome { point: Some(pt), s_s, .. }) = sparse {
                            let mut seen = std::collections::BTreeSet::new();
                            for dc in &pt.d {
                                for &b in dc {
                                    prop_assert!(seen.insert(b));
                                    prop_assert!(pt.x_bar[b] >= pt.x[b]);
                                }
                            }
                            for &c in &st2.clients {
                                if pt.x[c].is_positive() {
                                    prop_assert!(seen.contains(&c));
                                }
                            }
                            let spent: u64 = s_s.iter().map(|&f| costs[f]).sum();
                            prop_assert!(spent <= st2.budget + st2.sigma);
                        }
                    }
                }
            }
        }

        #[test]
        fn flower_preparation_dominates_x(
            inst in arb_instance(),
            ys in proptest::collection::vec(0i64..=4, 4),
            xs in proptest::collection::vec(0i64..=4, 5),
            r in 0u64..=6,
        ) {
            let space = &inst.space;
            let (costs, _) = inst.knapsack().unwrap();
            let y: Vec<Rational> = (0..space.n_facilities()).map(|f| rat(ys[f]) / rat(4)).collect();
            let x: Vec<Rational> = (0..space.n_clients())
                .map(|c| {
                    let mass: Rational = (0..space.n_facilities())
                        .filter(|&f| space.client_facility(c, f) <= r)
                        .map(|f| y[f].clone())
                        .sum();
                    let want = rat(xs[c]) / rat(4);
                    let cap = if mass > Rational::one() { Rational::one() } else { mass };
                    if want < cap { want } else { cap }
                })
                .collect();
            let clients: Vec<usize> = (0..space.n_clients()).collect();
            let facilities: Vec<usize> = (0..space.n_facilities()).collect();
            let pt = flower_preparation(space, costs, &clients, &facilities, &x, &y, r).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for dc in &pt.d {
                for &b in dc {
                    prop_assert!(seen.insert(b));
                    prop_assert!(pt.x_bar[b] >= x[b]);
                }
            }
            for c in 0..space.n_clients() {
                if x[c].is_positive() {
                    prop_assert!(seen.contains(&c));
                }
            }
        }
    }
}
