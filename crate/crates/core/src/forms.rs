//! Indefinite ternary quadratic forms of determinant −1 and the exact search
//! for the smallest nonzero value `|Q(n)|` over an integer ball.
//!
//! A form is stored as the symmetric matrix `S` with `Q(v) = v S vᵗ`. The
//! action of `g ∈ SL₃(ℝ)` is `Q^g(v) = Q(v g)`, i.e. `S ↦ g S gᵗ`.

use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lattice::sign_normalize;
use crate::linalg::{Mat3, Vec3};

/// Which norm bounds the integer search ball.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormChoice {
    #[default]
    Euclidean,
    Sup,
}

impl NormChoice {
    pub fn int_norm(&self, n: &[i64; 3]) -> f64 {
        match self {
            NormChoice::Euclidean => ((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) as f64).sqrt(),
            NormChoice::Sup => n.iter().map(|x| x.abs()).max().unwrap_or(0) as f64,
        }
    }

    /// Exact membership test `‖n‖ ≤ radius`.
    pub fn contains(&self, n: &[i64; 3], radius: f64) -> bool {
        match self {
            NormChoice::Euclidean => ((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) as f64) <= radius * radius,
            NormChoice::Sup => n.iter().all(|x| (x.abs() as f64) <= radius),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadForm {
    pub sym: Mat3,
    pub source_g: Option<Mat3>,
}

/// `S₀ = diag(1, 1, −1)`, the matrix of `x² + y² − z²`.
pub const S0: Mat3 = Mat3::diag(1.0, 1.0, -1.0);

impl QuadForm {
    pub fn q0() -> Self {
        QuadForm { sym: S0, source_g: None }
    }

    /// `Q₀^g`, `S = g S₀ gᵗ`.
    pub fn from_g(g: &Mat3) -> Result<Self> {
        let det = g.det();
        if !((det - 1.0).abs() <= 1e-8) {
            return Err(Error::NotUnimodular { det });
        }
        let mut sym = *g * S0 * g.transpose();
        // exact symmetry
        for i in 0..3 {
            for j in 0..i {
                let m = 0.5 * (sym.0[i][j] + sym.0[j][i]);
                sym.0[i][j] = m;
                sym.0[j][i] = m;
            }
        }
        Ok(QuadForm { sym, source_g: Some(*g) })
    }

    pub fn from_sym(sym: Mat3) -> Result<Self> {
        if sym.max_abs_diff(&sym.transpose()) > 1e-12 {
            return Err(domain("form matrix is not symmetric"));
        }
        if !((sym.det() + 1.0).abs() <= 1e-8) {
            return Err(domain(format!("form determinant {} is not −1", sym.det())));
        }
        Ok(QuadForm { sym, source_g: None })
    }

    /// `Q^γ`, the form `v ↦ Q(v γ)`.
    pub fn act(&self, g: &Mat3) -> Self {
        QuadForm { sym: *g * self.sym * g.transpose(), source_g: self.source_g.map(|s| *g * s) }
    }

    pub fn eval(&self, v: &Vec3) -> f64 {
        let s = &self.sym.0;
        s[0][0] * v[0] * v[0]
            + s[1][1] * v[1] * v[1]
            + s[2][2] * v[2] * v[2]
            + 2.0 * (s[0][1] * v[0] * v[1] + s[0][2] * v[0] * v[2] + s[1][2] * v[1] * v[2])
    }

    pub fn eval_int(&self, n: &[i64; 3]) -> f64 {
        self.eval(&[n[0] as f64, n[1] as f64, n[2] as f64])
    }
}

pub fn q0() -> QuadForm {
    QuadForm::q0()
}

pub fn form_from_g(g: &Mat3) -> Result<QuadForm> {
    QuadForm::from_g(g)
}

pub fn eval_form(q: &QuadForm, n: &[i64; 3]) -> f64 {
    q.eval_int(n)
}

/// Smallest `|Q(n)|` found for some nonzero `n` in a ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormValueResult {
    pub n: [i64; 3],
    pub value: f64,
    pub radius: f64,
    pub elapsed: f64,
}

/// Total order used to pick a minimiser: `|value|`, then the sign-normalised
/// `n` lexicographically ascending.
pub fn candidate_order(a: &(f64, [i64; 3]), b: &(f64, [i64; 3])) -> Ordering {
    a.0.abs().total_cmp(&b.0.abs()).then_with(|| a.1.cmp(&b.1))
}

fn better(a: Option<(f64, [i64; 3])>, b: Option<(f64, [i64; 3])>) -> Option<(f64, [i64; 3])> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if candidate_order(&x, &y) == Ordering::Greater { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Slicing axis: the last coordinate unless its diagonal entry is tiny.
fn slicing_axis(q: &QuadForm) -> usize {
    let d = [q.sym.0[0][0], q.sym.0[1][1], q.sym.0[2][2]];
    if d[2].abs() >= 1e-6 {
        2
    } else {
        (0..3).max_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs())).unwrap()
    }
}

/// Largest `z ≥ 0` with `z² ≤ rem` (exact for integer `rem` below 2⁵³).
fn isqrt_floor(rem: f64) -> i64 {
    if rem < 0.0 {
        return -1;
    }
    let mut z = rem.sqrt().floor() as i64;
    while ((z + 1) * (z + 1)) as f64 <= rem {
        z += 1;
    }
    while z > 0 && (z * z) as f64 > rem {
        z -= 1;
    }
    z
}

/// Exact minimiser of `|Q(n)|` over nonzero integer `n` with `‖n‖ ≤ T`.
///
/// For fixed values of two coordinates the form is a quadratic in the third;
/// `|Q|` restricted to integers is minimised next to its real roots, next to
/// the vertex, or at the ends of the admissible range, so only those points
/// are evaluated. `O(T²)` slices, run in parallel and merged with a total
/// order, so the result does not depend on the thread count.
pub fn min_form_value_direct(q: &QuadForm, radius: f64, norm: NormChoice) -> Result<FormValueResult> {
    if !(radius >= 1.0) || !radius.is_finite() {
        return Err(domain(format!("search radius {radius} must be at least 1")));
    }
    let start = Instant::now();
    let axis = slicing_axis(q);
    let (pa, pb) = match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let s = &q.sym.0;
    let r = radius.floor() as i64;
    let r2 = radius * radius;

    let best = (-r..=r)
        .into_par_iter()
        .map(|x| {
            let ylim = match norm {
                NormChoice::Euclidean => isqrt_floor(r2 - (x * x) as f64),
                NormChoice::Sup => r,
            };
            let mut best = None;
            for y in -ylim..=ylim {
                let zlim = match norm {
                    NormChoice::Euclidean => isqrt_floor(r2 - (x * x + y * y) as f64),
                    NormChoice::Sup => r,
                };
                if zlim < 0 {
                    continue;
                }
                let (xf, yf) = (x as f64, y as f64);
                let c2 = s[axis][axis];
                let c1 = 2.0 * (s[pa][axis] * xf + s[pb][axis] * yf);
                let c0 = s[pa][pa] * xf * xf + 2.0 * s[pa][pb] * xf * yf + s[pb][pb] * yf * yf;
                let mut cands: [f64; 14] = [f64::NAN; 14];
                let mut k = 0;
                let mut push = |z: f64| {
                    cands[k] = z;
                    k += 1;
                };
                push(-zlim as f64);
                push(zlim as f64);
                if c2.abs() >= 1e-12 {
                    let v = -c1 / (2.0 * c2);
                    push(v.floor());
                    push(v.ceil());
                    let disc = c1 * c1 - 4.0 * c2 * c0;
                    if disc >= 0.0 {
                        // cancellation-free roots
                        let qq = -0.5 * (c1 + c1.signum() * disc.sqrt());
                        let r1 = if qq != 0.0 { c0 / qq } else { 0.0 };
                        let r2 = qq / c2;
                        for root in [r1, r2] {
                            push(root.floor() - 1.0);
                            push(root.floor());
                            push(root.floor() + 1.0);
                            push(root.floor() + 2.0);
                        }
                    }
                } else if c1 != 0.0 {
                    let root = -c0 / c1;
                    push(root.floor());
                    push(root.ceil());
                }
                for &zf in &cands[..k] {
                    if !zf.is_finite() || zf.abs() > zlim as f64 {
                        continue;
                    }
                    let z = zf as i64;
                    let mut n = [0i64; 3];
                    n[pa] = x;
                    n[pb] = y;
                    n[axis] = z;
                    if n == [0, 0, 0] {
                        continue;
                    }
                    best = better(best, Some((q.eval_int(&n), sign_normalize(n))));
                }
                // the slice through the origin: z = ±1 are the only extra
                // candidates for the excluded zero vector
                if x == 0 && y == 0 && zlim >= 1 {
                    let mut n = [0i64; 3];
                    n[axis] = 1;
                    best = better(best, Some((q.eval_int(&n), sign_normalize(n))));
                }
            }
            best
        })
        .reduce(|| None, better);

    let (value, n) = best.ok_or_else(|| domain("empty search ball"))?;
    Ok(FormValueResult { n, value, radius, elapsed: start.elapsed().as_secs_f64() })
}
