//! (L, r)-partitions of a colorful space.
//!
//! A partition of the clients is an (L, r)-partition when every part has
//! diameter at most L·r and, for every facility set Z, some parts can be
//! matched injectively to nearby members of Z while dominating Z's radius-r
//! coverage in every color. [`build_partition`] constructs one with
//! L = 10(2^γ − 1) by adding colors one at a time with [`greedy_extend`];
//! [`verify_partition`] checks both properties by brute force.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{matching_size, max_matching, saturates_left};
use crate::model::{coverage, ColorfulSpace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// Sorted client indices per part.
    pub parts: Vec<Vec<usize>>,
    pub l_factor: u64,
    pub radius: u64,
    /// Facility whose greedy step created the part; `None` for base singletons.
    pub anchors: Vec<Option<usize>>,
}

impl Partition {
    pub fn singletons(clients: impl IntoIterator<Item = usize>, radius: u64) -> Self {
        let parts: Vec<Vec<usize>> = clients.into_iter().map(|c| vec![c]).collect();
        let anchors = vec![None; parts.len()];
        Self {
            parts,
            l_factor: 0,
            radius,
            anchors,
        }
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn clients(&self) -> impl Iterator<Item = usize> + '_ {
        self.parts.iter().flatten().copied()
    }
}

/// L = 10(2^γ − 1).
pub fn partition_factor(gamma: usize) -> u64 {
    10 * ((1u64 << gamma) - 1)
}

/// One iteration of the greedy loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyStep {
    pub anchor: usize,
    /// w_γ(B_C(anchor, r) ∩ U_i), the quantity the argmax maximised.
    pub gain: u64,
    /// Clients still uncovered at the start of the step (U_i).
    pub uncovered: Vec<usize>,
    /// The new part; possibly empty.
    pub part: Vec<usize>,
}

/// Extends `base`, a partition of `active \ supp(w_color)`, to a
/// (2L + 10, r)-partition of `active`.
pub fn greedy_extend(
    space: &ColorfulSpace,
    active: &[usize],
    base: &Partition,
    color: usize,
    r: u64,
) -> Result<Partition> {
    greedy_extend_traced(space, active, base, color, r).map(|(p, _)| p)
}

pub fn greedy_extend_traced(
    space: &ColorfulSpace,
    active: &[usize],
    base: &Partition,
    color: usize,
    r: u64,
) -> Result<(Partition, Vec<GreedyStep>)> {
    let nc = space.n_clients();
    let nf = space.n_facilities();
    let mut is_active = vec![false; nc];
    for &c in active {
        is_active[c] = true;
    }
    let colored: Vec<usize> = active
        .iter()
        .copied()
        .filter(|&c| space.weight(c, color) > 0)
        .collect();

    let mut in_base = vec![false; nc];
    for c in base.clients() {
        if !is_active[c] || space.weight(c, color) > 0 || in_base[c] {
            return Err(Error::Shape(format!(
                "base partition must cover exactly the active clients outside color {color}"
            )));
        }
        in_base[c] = true;
    }
    if active
        .iter()
        .any(|&c| space.weight(c, color) == 0 && !in_base[c])
    {
        return Err(Error::Shape(
            "base partition misses an active client outside the new color".into(),
        ));
    }
    if let Some(&c) = active
        .iter()
        .find(|&&c| space.facilities_within(c, r).next().is_none())
    {
        return Err(Error::UncoveredClient(c));
    }

    let r3 = r.saturating_mul(3);
    let r5 = r.saturating_mul(5);
    let mut uncovered = is_active.clone();
    let mut picked = vec![false; nf];
    let mut base_taken = vec![false; base.parts.len()];
    let mut parts = Vec::new();
    let mut anchors = Vec::new();
    let mut steps = Vec::with_capacity(nf);

    for _ in 0..nf {
        let gain_of = |f: usize| -> u64 {
            active
                .iter()
                .filter(|&&c| uncovered[c] && space.client_facility(c, f) <= r)
                .map(|&c| space.weight(c, color))
                .sum()
        };
        let mut best: Option<(usize, u64)> = None;
        for f in (0..nf).filter(|&f| !picked[f]) {
            let g = gain_of(f);
            if best.is_none_or(|(_, bg)| g > bg) {
                best = Some((f, g));
            }
        }
        let (anchor, gain) = best.expect("an unpicked facility remains");
        picked[anchor] = true;
        let snapshot: Vec<usize> = active.iter().copied().filter(|&c| uncovered[c]).collect();

        let mut part: Vec<usize> = colored
            .iter()
            .copied()
            .filter(|&c| uncovered[c] && space.client_facility(c, anchor) <= r3)
            .collect();
        for (k, a) in base.parts.iter().enumerate() {
            if base_taken[k] {
                continue;
            }
            if space
                .set_facility_distance(a, anchor)
                .is_some_and(|d| d <= r5)
            {
                base_taken[k] = true;
                part.extend_from_slice(a);
            }
        }
        part.sort_unstable();
        for &c in &part {
            uncovered[c] = false;
        }
        if !part.is_empty() {
            parts.push(part.clone());
            anchors.push(Some(anchor));
        }
        steps.push(GreedyStep {
            anchor,
            gain,
            uncovered: snapshot,
            part,
        });
    }

    if let Some(c) = active.iter().copied().find(|&c| uncovered[c]) {
        return Err(Error::Internal(format!(
            "greedy partition left client {c} unassigned"
        )));
    }
    Ok((
        Partition {
            parts,
            l_factor: 2 * base.l_factor + 10,
            radius: r,
            anchors,
        },
        steps,
    ))
}

/// A (10(2^γ − 1), r)-partition of all clients. Clients with no facility
/// within `r` are set aside during construction and returned as singletons.
pub fn build_partition(space: &ColorfulSpace, r: u64) -> Partition {
    let nc = space.n_clients();
    let gamma = space.gamma();
    if gamma == 0 {
        return Partition::singletons(0..nc, r);
    }
    let (reachable, unreachable): (Vec<usize>, Vec<usize>) =
        (0..nc).partition(|&c| space.facilities_within(c, r).next().is_some());

    let mut in_active = vec![false; nc];
    let mut active: Vec<usize> = reachable
        .iter()
        .copied()
        .filter(|&c| space.weights_of(c).iter().all(|&w| w == 0))
        .collect();
    for &c in &active {
        in_active[c] = true;
    }
    let mut current = Partition::singletons(active.iter().copied(), r);
    for color in 0..gamma {
        for &c in &reachable {
            if !in_active[c] && space.weight(c, color) > 0 {
                in_active[c] = true;
                active.push(c);
            }
        }
        active.sort_unstable();
        current = greedy_extend(space, &active, &current, color, r)
            .expect("purged clients all have a facility within r");
    }
    for c in unreachable {
        current.parts.push(vec![c]);
        current.anchors.push(None);
    }
    debug_assert_eq!(current.l_factor, partition_factor(gamma));
    current
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    DiameterOnly,
    ExhaustiveZ,
    SampledZ { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionWitness {
    /// The facility set Z this witness answers.
    pub z: Vec<usize>,
    /// Indices of the selected parts.
    pub subfamily: Vec<usize>,
    /// Facility assigned to each selected part (same order as `subfamily`).
    pub assignment: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A client appears in no part or in several.
    NotAPartition {
        client: usize,
        occurrences: usize,
    },
    Diameter {
        part: usize,
        diameter: u64,
        bound: u64,
    },
    NoWitness {
        z: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub witnesses_found: usize,
    #[serde(skip)]
    pub witnesses: Vec<PartitionWitness>,
}

pub const EXHAUSTIVE_FACILITY_LIMIT: usize = 20;

pub fn verify_partition(
    space: &ColorfulSpace,
    partition: &Partition,
    r: u64,
    mode: VerifyMode,
) -> Result<VerifyReport> {
    let mut violations = Vec::new();
    let mut seen = vec![0usize; space.n_clients()];
    for c in partition.clients() {
        seen[c] += 1;
    }
    for (client, &occurrences) in seen.iter().enumerate() {
        if occurrences != 1 {
            violations.push(Violation::NotAPartition {
                client,
                occurrences,
            });
        }
    }
    let bound = partition.l_factor.saturating_mul(r);
    for (k, part) in partition.parts.iter().enumerate() {
        let diameter = space.diameter(part);
        if diameter > bound {
            violations.push(Violation::Diameter {
                part: k,
                diameter,
                bound,
            });
        }
    }

    let nf = space.n_facilities();
    let z_sets: Vec<Vec<usize>> = match mode {
        VerifyMode::DiameterOnly => Vec::new(),
        VerifyMode::ExhaustiveZ => {
            if nf > EXHAUSTIVE_FACILITY_LIMIT {
                return Err(Error::SizeLimitExceeded {
                    what: "facilities",
                    size: nf,
                    limit: EXHAUSTIVE_FACILITY_LIMIT,
                });
            }
            (0u64..1 << nf).map(|mask| mask_members(mask, nf)).collect()
        }
        VerifyMode::SampledZ { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| (0..nf).filter(|_| rng.gen_bool(0.5)).collect())
                .collect()
        }
    };

    let mut witnesses = Vec::new();
    for z in z_sets {
        match find_witness(space, partition, r, &z) {
            Some(w) => witnesses.push(w),
            None => violations.push(Violation::NoWitness { z }),
        }
    }
    Ok(VerifyReport {
        ok: violations.is_empty(),
        violations,
        witnesses_found: witnesses.len(),
        witnesses,
    })
}

fn mask_members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Searches for parts matchable into `z` whose union dominates B_C(z, r).
///
/// Weights are nonnegative, so it suffices to scan maximum-size matchable
/// subfamilies (bases of the induced transversal matroid).
pub fn find_witness(
    space: &ColorfulSpace,
    partition: &Partition,
    r: u64,
    z: &[usize],
) -> Option<PartitionWitness> {
    let target = coverage(space, z, r).expect("z within facility range");
    let candidates: Vec<usize> = (0..partition.parts.len())
        .filter(|&k| {
            z.iter().any(|&f| {
                space
                    .set_facility_distance(&partition.parts[k], f)
                    .is_some_and(|d| d <= r)
            })
        })
        .collect();
    let adj_of = |k: usize| -> Vec<usize> {
        (0..z.len())
            .filter(|&j| {
                space
                    .set_facility_distance(&partition.parts[k], z[j])
                    .is_some_and(|d| d <= r)
            })
            .collect()
    };
    let adj_all: Vec<Vec<usize>> = candidates.iter().map(|&k| adj_of(k)).collect();
    let rank = matching_size(&adj_all, z.len());
    let part_weight: Vec<Vec<u64>> = candidates
        .iter()
        .map(|&k| space.weight_of_set(partition.parts[k].iter().copied()))
        .collect();

    let mut chosen: Vec<usize> = Vec::with_capacity(rank);
    let mut found = None;
    combinations(candidates.len(), rank, &mut chosen, 0, &mut |sel| {
        let mut acc = vec![0u64; space.gamma()];
        for &i in sel {
            for (a, w) in acc.iter_mut().zip(&part_weight[i]) {
                *a += w;
            }
        }
        if acc.iter().zip(&target).any(|(a, t)| a < t) {
            return false;
        }
        let adj: Vec<Vec<usize>> = sel.iter().map(|&i| adj_all[i].clone()).collect();
        if !saturates_left(&adj, z.len()) {
            return false;
        }
        let m = max_matching(&adj, z.len());
        found = Some(PartitionWitness {
            z: z.to_vec(),
            subfamily: sel.iter().map(|&i| candidates[i]).collect(),
            assignment: m.iter().map(|j| z[j.expect("saturated")]).collect(),
        });
        true
    });
    found
}

/// Visits k-subsets of 0..n in lexicographic order until `visit` returns true.
fn combinations(
    n: usize,
    k: usize,
    chosen: &mut Vec<usize>,
    start: usize,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if chosen.len() == k {
        return visit(chosen);
    }
    let need = k - chosen.len();
    for i in start..=n.saturating_sub(need) {
        if n < need {
            break;
        }
        chosen.push(i);
        if combinations(n, k, chosen, i + 1, visit) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::tiny1_space;

    #[test]
    fn factor_formula() {
        assert_eq!(partition_factor(0), 0);
        assert_eq!(partition_factor(1), 10);
        assert_eq!(partition_factor(2), 30);
        assert_eq!(partition_factor(3), 70);
    }

    #[test]
    fn greedy_on_tiny1() {
        let s = tiny1_space();
        let base = Partition::singletons([], 1);
        let (p, steps) = greedy_extend_traced(&s, &[0, 1, 2], &base, 0, 1).unwrap();
        assert_eq!(p.parts, vec![vec![0, 1], vec![2]]);
        assert_eq!(p.anchors, vec![Some(0), Some(1)]);
        assert_eq!(p.l_factor, 10);
        assert_eq!(steps[0].gain, 2);
        assert_eq!(steps[1].gain, 1);
    }

    #[test]
    fn build_on_tiny1_matches_greedy() {
        let p = build_partition(&tiny1_space(), 1);
        assert_eq!(p.parts, vec![vec![0, 1], vec![2]]);
        assert_eq!(p.l_factor, 10);
    }

    #[test]
    fn gamma_zero_is_singletons() {
        let s = ColorfulSpace::new(
            vec!["a".into(), "b".into()],
            vec!["f".into()],
            vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
            0,
            vec![vec![]; 2],
        )
        .unwrap();
        let p = build_partition(&s, 1);
        assert_eq!(p.parts, vec![vec![0], vec![1]]);
        assert_eq!(p.l_factor, 0);
        let rep = verify_partition(&s, &p, 1, VerifyMode::ExhaustiveZ).unwrap();
        assert!(rep.ok, "{:?}", rep.violations);
    }

    #[test]
    fn zero_weight_color_takes_base_parts_within_5r() {
        // a line: f0 at 0, clients at 2 and 9, f1 at 10; color 0 absent
        let pts = [2u64, 9, 0, 10];
        let dist = pts
            .iter()
            .map(|&a| pts.iter().map(|&b| a.abs_diff(b)).collect())
            .collect();
        let s = ColorfulSpace::new(
            vec!["a".into(), "b".into()],
            vec!["f0".into(), "f1".into()],
            dist,
            1,
            vec![vec![0], vec![0]],
        )
        .unwrap();
        let base = Partition::singletons([0, 1], 2);
        let p = greedy_extend(&s, &[0, 1], &base, 0, 2).unwrap();
        let mut all: Vec<usize> = p.clients().collect();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1]);
        // f0 is the lowest-index tie and d(f0, b) = 9 <= 10 pulls in both
        assert_eq!(p.parts, vec![vec![0, 1]]);
    }

    #[test]
    fn single_facility_swallows_everything() {
        let pts = [0u64, 1, 2, 1];
        let dist = pts
            .iter()
            .map(|&a| pts.iter().map(|&b| a.abs_diff(b)).collect())
            .collect();
        let s = ColorfulSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["f".into()],
            dist,
            1,
            vec![vec![1], vec![1], vec![1]],
        )
        .unwrap();
        let p = build_partition(&s, 1);
        assert_eq!(p.parts, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn uncovered_client_rejected() {
        let s = tiny1_space();
        let err = greedy_extend(&s, &[0, 1, 2], &Partition::singletons([], 0), 0, 0).unwrap_err();
        assert_eq!(err, Error::UncoveredClient(0));
    }

    #[test]
    fn unreachable_clients_restored_as_singletons() {
        let s = tiny1_space();
        let p = build_partition(&s, 0);
        assert_eq!(p.parts.len(), 3);
        assert!(p.anchors.iter().all(Option::is_none));
        assert!(
            verify_partition(&s, &p, 0, VerifyMode::ExhaustiveZ)
                .unwrap()
                .ok
        );
    }

    #[test]
    fn witness_on_tiny1_full_z() {
        let s = tiny1_space();
        let p = build_partition(&s, 1);
        let w = find_witness(&s, &p, 1, &[0, 1]).unwrap();
        assert_eq!(w.subfamily, vec![0, 1]);
        assert_eq!(w.assignment, vec![0, 1]);
        let rep = verify_partition(&s, &p, 1, VerifyMode::ExhaustiveZ).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.witnesses_found, 4);
    }

    #[test]
    fn oversized_part_flagged() {
        let s = tiny1_space();
        // diameter of {c1, c3} is 6 > 0 * 1
        let p = Partition {
            parts: vec![vec![0, 2], vec![1]],
            l_factor: 0,
            radius: 1,
            anchors: vec![None, None],
        };
        let rep = verify_partition(&s, &p, 1, VerifyMode::DiameterOnly).unwrap();
        assert_eq!(
            rep.violations,
            vec![Violation::Diameter {
                part: 0,
                diameter: 6,
                bound: 0
            }]
        );
    }

    #[test]
    fn declared_factor_too_small_flagged() {
        // line with c at 0 and 11, f at 0 and 11; one part spanning 11 = 11r
        let pts = [0u64, 11, 0, 11];
        let dist = pts
            .iter()
            .map(|&a| pts.iter().map(|&b| a.abs_diff(b)).collect())
            .collect();
        let s = ColorfulSpace::new(
            vec!["a".into(), "b".into()],
            vec!["f".into(), "g".into()],
            dist,
            1,
            vec![vec![1], vec![1]],
        )
        .unwrap();
        let p = Partition {
            parts: vec![vec![0, 1]],
            l_factor: 10,
            radius: 1,
            anchors: vec![Some(0)],
        };
        let rep = verify_partition(&s, &p, 1, VerifyMode::DiameterOnly).unwrap();
        assert!(!rep.ok);
        assert!(matches!(
            rep.violations[0],
            Violation::Diameter {
                diameter: 11,
                bound: 10,
                ..
            }
        ));
    }

    #[test]
    fn missing_client_is_not_a_partition() {
        let s = tiny1_space();
        let p = Partition {
            parts: vec![vec![0, 1]],
            l_factor: 10,
            radius: 1,
            anchors: vec![Some(0)],
        };
        let rep = verify_partition(&s, &p, 1, VerifyMode::DiameterOnly).unwrap();
        assert_eq!(
            rep.violations,
            vec![Violation::NotAPartition {
                client: 2,
                occurrences: 0
            }]
        );
    }

    #[test]
    fn sampled_mode_is_seeded() {
        let s = tiny1_space();
        let p = build_partition(&s, 1);
        let a = verify_partition(
            &s,
            &p,
            1,
            VerifyMode::SampledZ {
                samples: 8,
                seed: 3,
            },
        )
        .unwrap();
        let b = verify_partition(
            &s,
            &p,
            1,
            VerifyMode::SampledZ {
                samples: 8,
                seed: 3,
            },
        )
        .unwrap();
        assert_eq!(a.witnesses, b.witnesses);
        assert_eq!(a.witnesses_found, 8);
    }
}
