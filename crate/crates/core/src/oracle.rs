//! Slow exhaustive reference searches.
//!
//! These share nothing with the fast kernels beyond the tie-break rules and
//! are used by the self-test and the test suites.

use std::cmp::Ordering;

use crate::forms::{candidate_order, NormChoice, QuadForm};
use crate::lattice::{lengths_tied, prefer_coeffs, sign_normalize, ShortVectorResult};
use crate::linalg::{dot, Mat3};

/// Shortest nonzero `n · basis` over the box `|nᵢ| ≤ bound`.
pub fn brute_force_shortest(basis: &Mat3, bound: i64) -> ShortVectorResult {
    let mut all = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                let n = [a, b, c];
                if n == [0, 0, 0] || sign_normalize(n) != n {
                    continue;
                }
                let v = basis.left_mul_int(&n);
                all.push((n, dot(&v, &v)));
            }
        }
    }
    let min = all.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let mut best: Option<[i64; 3]> = None;
    for (n, l2) in all {
        if lengths_tied(l2, min) {
            match best {
                Some(b) if prefer_coeffs(&n, &b) != Ordering::Less => {}
                _ => best = Some(n),
            }
        }
    }
    let n = best.expect("box contains a nonzero vector");
    let vector = basis.left_mul_int(&n);
    ShortVectorResult { coeffs: n, vector, length: dot(&vector, &vector).sqrt() }
}

/// Minimiser of `|Q(n)|` over every nonzero integer point of the ball.
pub fn brute_force_form_min(q: &QuadForm, radius: f64, norm: NormChoice) -> ([i64; 3], f64) {
    let r = radius.floor() as i64;
    let mut best: Option<(f64, [i64; 3])> = None;
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let n = [a, b, c];
                if n == [0, 0, 0] || !norm.contains(&n, radius) {
                    continue;
                }
                let cand = (q.eval_int(&n), sign_normalize(n));
                best = match best {
                    Some(cur) if candidate_order(&cur, &cand) != Ordering::Greater => Some(cur),
                    _ => Some(cand),
                };
            }
        }
    }
    let (_, n) = best.expect("ball of radius ≥ 1 has a nonzero point");
    (n, q.eval_int(&n))
}
