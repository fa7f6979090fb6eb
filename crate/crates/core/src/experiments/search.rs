//! Candidate points of `H_T` shared by every orbit search.
//!
//! The plan is a deterministic stratified grid followed by the same number
//! of Haar-random points. Grid: `t` at the midpoints of equiprobable strata
//! of the `sinh t` density, `θ` and `θ′` on an `n × n` grid over `[0, π)`
//! (`n = 8` once the budget allows), with the identity first. Searches
//! evaluate candidates in parallel and keep the lowest index, so witnesses
//! do not depend on the thread count.

use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::KakCoords;
use crate::rng::RandomStream;
use crate::spin::{angle_grid, HBall, HElement};

/// Angular grid resolution once the budget covers it.
pub const ANGLE_GRID: usize = 8;

pub fn grid_candidates(ball: &HBall, budget: usize) -> Vec<HElement> {
    let budget = budget.max(1);
    let n_ang =
        if budget >= ANGLE_GRID * ANGLE_GRID { ANGLE_GRID } else { ((budget as f64).sqrt().floor() as usize).max(1) };
    let cell = n_ang * n_ang;
    let n_t = (budget - 1).div_ceil(cell).max(1);
    let mut out = Vec::with_capacity(n_t * n_ang * n_ang + 1);
    out.push(HElement::identity());
    'fill: for j in 0..n_t {
        let t = ball.t_quantile((j as f64 + 0.5) / n_t as f64);
        for theta in angle_grid(n_ang) {
            for theta_prime in angle_grid(n_ang) {
                if out.len() >= budget {
                    break 'fill;
                }
                out.push(HElement::from_kak(KakCoords::new(theta, t, theta_prime)));
            }
        }
    }
    out
}

/// Grid of size `budget` followed by `budget` Haar-random points of `H_T`.
pub fn search_candidates(radius: f64, budget: usize, rng: &RandomStream) -> Result<Vec<HElement>> {
    let ball = HBall::new(radius)?;
    let mut out = grid_candidates(&ball, budget);
    let mut r = rng.split_named("haar", 0);
    out.extend((0..budget.max(1)).map(|_| ball.sample(&mut r)));
    Ok(out)
}

/// Index and value of the first candidate satisfying `pred`.
pub fn first_match<T: Send>(
    cands: &[HElement],
    f: impl Fn(&HElement) -> Option<T> + Sync + Send,
) -> Option<(usize, T)> {
    cands.par_iter().enumerate().filter_map(|(i, h)| f(h).map(|v| (i, v))).find_first(|_| true)
}

/// Largest `score` over the candidates; ties go to the lowest index.
pub fn arg_max(cands: &[HElement], score: impl Fn(&HElement) -> f64 + Sync + Send) -> Option<(usize, f64)> {
    cands.par_iter().enumerate().map(|(i, h)| (i, score(h))).reduce_with(|a, b| match a.1.total_cmp(&b.1) {
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Equal => {
            if a.0 <= b.0 {
                a
            } else {
                b
            }
        }
    })
}

/// Smallest `score`; ties go to the lowest index.
pub fn arg_min(cands: &[HElement], score: impl Fn(&HElement) -> f64 + Sync + Send) -> Option<(usize, f64)> {
    arg_max(cands, |h| -score(h)).map(|(i, v)| (i, -v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_sizes() {
        let rng = RandomStream::new(5);
        let c = search_candidates(100.0, 1000, &rng).unwrap();
        assert_eq!(c.len(), 2000);
        assert_eq!(c[0].matrix, HElement::identity().matrix);
        assert!(c.iter().all(|h| h.norm <= 100.0 * (1.0 + 1e-8)));
        let c = search_candidates(10.0, 1, &rng).unwrap();
        assert_eq!(c.len(), 2);
        assert!(search_candidates(1.0, 10, &rng).is_err());
    }

    #[test]
    fn grid_is_stratified() {
        let ball = HBall::new(1000.0).unwrap();
        let g = grid_candidates(&ball, 64 * 10);
        let ts: Vec<f64> = g[1..].iter().step_by(64).map(|h| h.kak.t).collect();
        assert_eq!(ts.len(), 10);
        for (j, t) in ts.iter().enumerate() {
            assert!((ball.t_cdf(*t) - (j as f64 + 0.5) / 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn reductions_prefer_low_index() {
        let rng = RandomStream::new(6);
        let c = search_candidates(50.0, 100, &rng).unwrap();
        assert_eq!(arg_max(&c, |_| 1.0).unwrap().0, 0);
        assert_eq!(first_match(&c, |h| (h.norm > 2.0).then_some(())).unwrap().0, 1);
    }
}
