//! Excursion series `β_T(x)` (cusp) and `β_T(x, y)` (point).

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::lattice::{cusp_distance, point_distance, LatticePoint};
use crate::rng::RandomStream;

use super::search::{arg_max, arg_min, search_candidates};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BetaTarget {
    Cusp,
    Point { center: LatticePoint },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaPoint {
    pub radius: f64,
    /// Extremum found in this ball's own search.
    pub raw: f64,
    /// Running extremum over the ladder so far.
    pub beta: f64,
    /// `β/ln T` (cusp) or `−ln β / ln T` (point).
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcursionSeries {
    pub target: BetaTarget,
    pub points: Vec<BetaPoint>,
    /// Point targets use the surrogate distance.
    pub approximate: bool,
}

impl ExcursionSeries {
    pub fn terminal_ratio(&self) -> Option<f64> {
        self.points.last().map(|p| p.ratio)
    }
}

/// Extremise the distance over the search plan of each ladder radius.
/// Balls are nested, so the running max (cusp) or min (point) carried
/// along the ladder is the excursion at that radius.
pub fn beta_series(
    x: &LatticePoint,
    target: &BetaTarget,
    ladder: &[f64],
    budget: usize,
    rng: &RandomStream,
) -> Result<ExcursionSeries> {
    if ladder.is_empty() || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("ladder must be nonempty and strictly increasing"));
    }
    let mut points = Vec::with_capacity(ladder.len());
    let mut running: Option<f64> = None;
    for (i, &radius) in ladder.iter().enumerate() {
        let cands = search_candidates(radius, budget, &rng.split(i as u64))?;
        let (raw, beta, ratio) = match target {
            BetaTarget::Cusp => {
                let (_, raw) = arg_max(&cands, |h| cusp_distance(&x.translate(h))).expect("nonempty plan");
                let beta = running.map_or(raw, |r| r.max(raw));
                (raw, beta, beta / radius.ln())
            }
            BetaTarget::Point { center } => {
                let (_, raw) = arg_min(&cands, |h| point_distance(&x.translate(h), center)).expect("nonempty plan");
                let beta = running.map_or(raw, |r| r.min(raw));
                (raw, beta, -beta.ln() / radius.ln())
            }
        };
        running = Some(beta);
        points.push(BetaPoint { radius, raw, beta, ratio });
    }
    Ok(ExcursionSeries { approximate: matches!(target, BetaTarget::Point { .. }), target: target.clone(), points })
}
