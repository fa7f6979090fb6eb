//! Hit tests for shrinking targets and the empirical critical exponent.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::lattice::LatticePoint;
use crate::rng::RandomStream;
use crate::spin::HElement;

use super::search::{arg_max, first_match, search_candidates};
use super::targets::TargetFamily;

/// Outcome of a finite search; `hit == false` means "not found within the
/// budget", never non-existence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitResult {
    pub hit: bool,
    pub witness: Option<HElement>,
    pub witness_index: Option<usize>,
    pub candidates: usize,
}

/// Search `H_T` for `h` with `x·ι(h) ∈ A_{T^η}`.
pub fn hit_test(
    x: &LatticePoint,
    radius: f64,
    eta: f64,
    family: &TargetFamily,
    budget: usize,
    rng: &RandomStream,
) -> Result<HitResult> {
    if !(eta >= 0.0) {
        return Err(domain(format!("exponent {eta} must be nonnegative")));
    }
    let cands = search_candidates(radius, budget, rng)?;
    let level = radius.powf(eta);
    let found = first_match(&cands, |h| family.contains(&x.translate(h), level).then_some(*h));
    Ok(HitResult {
        hit: found.is_some(),
        witness: found.map(|f| f.1),
        witness_index: found.map(|f| f.0),
        candidates: cands.len(),
    })
}

/// `x·ι(h) ∈ A_{‖h‖^η}`: membership in the set whose boundedness defines
/// the critical exponent. A hit-test witness at radius `T` belongs to it
/// (its target `A_{T^η}` is smaller), and stays a witness for every larger
/// radius.
pub fn in_exponent_set(x: &LatticePoint, h: &HElement, eta: f64, family: &TargetFamily) -> bool {
    family.contains(&x.translate(h), h.norm.powf(eta))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub radius: f64,
    /// Deepest target level reached, `max_h sup{t : x·ι(h) ∈ A_t}`.
    pub max_depth: f64,
    /// Largest `η` with a hit at this radius, `ln(max_depth) / ln T`.
    pub eta_reached: f64,
    /// Whether this radius is hit at `eta_lower`.
    pub hit: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub eta_lower: f64,
    pub eta_upper: f64,
    /// Every `η` in the search range was feasible.
    pub saturated: bool,
    pub ladder: Vec<LadderEntry>,
    pub budget: usize,
}

pub const ETA_RANGE: f64 = 3.0;
pub const BRACKET_WIDTH: f64 = 0.05;

/// Bracket the largest `η ∈ [0, 3]` for which the target `A_{T^η}` is hit at
/// every radius of the ladder. Each radius is searched once (its own split
/// stream) and the bisection runs on the recorded depths.
pub fn critical_exponent_estimate(
    x: &LatticePoint,
    family: &TargetFamily,
    ladder: &[f64],
    budget: usize,
    rng: &RandomStream,
) -> Result<ExponentEstimate> {
    if ladder.len() < 4 {
        return Err(domain("critical exponent needs a ladder of at least 4 radii"));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("ladder must be strictly increasing"));
    }
    let mut depths = Vec::with_capacity(ladder.len());
    for (i, &radius) in ladder.iter().enumerate() {
        let cands = search_candidates(radius, budget, &rng.split(i as u64))?;
        let (_, d) = arg_max(&cands, |h| family.depth(&x.translate(h))).expect("nonempty plan");
        depths.push(d);
    }
    let feasible = |eta: f64| ladder.iter().zip(&depths).all(|(t, d)| *d >= t.powf(eta));
    let (lower, upper, saturated) = if feasible(ETA_RANGE) {
        (ETA_RANGE, ETA_RANGE, true)
    } else if !feasible(0.0) {
        (0.0, 0.0, false)
    } else {
        let (mut lo, mut hi) = (0.0, ETA_RANGE);
        while hi - lo > BRACKET_WIDTH {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi, false)
    };
    let entries = ladder
        .iter()
        .zip(&depths)
        .map(|(&radius, &max_depth)| LadderEntry {
            radius,
            max_depth,
            eta_reached: if max_depth.is_infinite() { f64::INFINITY } else { max_depth.ln() / radius.ln() },
            hit: max_depth >= radius.powf(lower),
        })
        .collect();
    Ok(ExponentEstimate { eta_lower: lower, eta_upper: upper, saturated, ladder: entries, budget })
}
