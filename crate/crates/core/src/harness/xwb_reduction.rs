//! Exact-weight basis as a two-color matroid supplier instance.

use crate::error::Result;
use crate::harness::generate::XwbInstance;
use crate::model::{ColorfulSpace, FacilityConstraint, SupplierInstance};

pub const DEFAULT_SEPARATION: u64 = 1000;

/// One client with a co-located facility per ground element, elements
/// `separation` apart on a line. Client e weighs (w̄(e), W̄ − w̄(e)) with
/// W̄ = max w̄, and the requirements are m̄ and rank·W̄ − m̄ (floored at 0).
/// Radius 0 is feasible exactly when some basis weighs m̄.
pub fn xwb_to_colorful(xwb: &XwbInstance, separation: u64) -> Result<SupplierInstance> {
    let n = xwb.columns.len();
    let rank = xwb.matrix()?.rank() as u64;
    let w_max = xwb.weights.iter().copied().max().unwrap_or(0);
    let pos: Vec<u64> = (0..n as u64).map(|i| i * separation.max(1)).collect();
    let at = |k: usize| pos[k % n.max(1)];
    let dist: Vec<Vec<u64>> = (0..2 * n)
        .map(|a| (0..2 * n).map(|b| at(a).abs_diff(at(b))).collect())
        .collect();
    let weights: Vec<Vec<u64>> = xwb.weights.iter().map(|&w| vec![w, w_max - w]).collect();
    let space = ColorfulSpace::new(
        (0..n).map(|i| format!("c{i}")).collect(),
        (0..n).map(|i| format!("f{i}")).collect(),
        dist,
        2,
        weights,
    )?;
    let m2 = (rank * w_max).saturating_sub(xwb.target);
    SupplierInstance::new(
        space,
        vec![xwb.target, m2],
        FacilityConstraint::LinearMatroid {
            prime: xwb.prime,
            columns: xwb.columns.clone(),
        },
    )
}
