//! Unimodular lattices `Λ = ℤ³·g` as points of `X₃ = SL₃(ℤ)\SL₃(ℝ)`.
//!
//! Every [`LatticePoint`] carries an LLL-reduced basis together with the
//! integer transition matrix from the input basis, and its exact shortest
//! vector (Fincke–Pohst enumeration over the reduced basis).
//!
//! Haar sampling draws a basis from a Siegel set in Gram–Schmidt coordinates,
//! where Haar measure is `(d₁/d₃)² dμ d*d₁ d*d₂ dk`, and accepts it with
//! probability `1/M(Λ)`, `M(Λ)` being the number of bases of `Λ` (up to sign)
//! lying in that Siegel set. Accepted lattices are exactly Haar distributed.

use std::cmp::Ordering;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Mat3, Vec3};
use crate::rng::RandomStream;
use crate::spin::HElement;

pub type IntMat3 = [[i64; 3]; 3];

/// Lovász parameter.
pub const LLL_DELTA: f64 = 0.99;
/// Tolerance on `|det − 1|` accepted for a lattice basis.
pub const UNIMODULAR_TOL: f64 = 1e-8;
/// Relative tolerance under which two squared lengths count as tied.
const TIE_REL: f64 = 1e-12;

const INT_IDENTITY: IntMat3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

/// Gram–Schmidt data of three rows.
#[derive(Clone, Copy, Debug)]
pub struct Gso {
    pub mu: [[f64; 3]; 3],
    pub bstar: [Vec3; 3],
    pub b2: [f64; 3],
}

pub fn gso(rows: &[Vec3; 3]) -> Gso {
    let mut mu = [[0.0; 3]; 3];
    let mut bstar = *rows;
    let mut b2 = [0.0; 3];
    for i in 0..3 {
        for j in 0..i {
            mu[i][j] = dot(&rows[i], &bstar[j]) / b2[j];
            for k in 0..3 {
                bstar[i][k] -= mu[i][j] * bstar[j][k];
            }
        }
        mu[i][i] = 1.0;
        b2[i] = dot(&bstar[i], &bstar[i]);
    }
    Gso { mu, bstar, b2 }
}

pub fn int_det(u: &IntMat3) -> i128 {
    let m = |i: usize, j: usize| u[i][j] as i128;
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

fn combine(u: &IntMat3, basis: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in u.iter().enumerate() {
        out[i] = basis.left_mul_int(row);
    }
    Mat3(out)
}

/// Reduced basis and the integer matrix `U` with `reduced = U · basis`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub reduced: Mat3,
    pub transform: IntMat3,
}

fn lll_pass(b: &mut [Vec3; 3], u: &mut IntMat3, delta: f64) -> bool {
    let mut changed = false;
    let mut k = 1;
    let mut guard = 0;
    while k < 3 && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let g = gso(b);
            let q = g.mu[k][j].round();
            if q != 0.0 && q.is_finite() {
                let qi = q as i64;
                for c in 0..3 {
                    b[k][c] -= q * b[j][c];
                    u[k][c] -= qi * u[j][c];
                }
                changed = true;
            }
        }
        let g = gso(b);
        let m = g.mu[k][k - 1];
        if g.b2[k] >= (delta - m * m) * g.b2[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            changed = true;
            k = (k - 1).max(1);
        }
    }
    changed
}

fn lll_unchecked(basis: &Mat3, delta: f64) -> Reduction {
    let mut u = INT_IDENTITY;
    let mut b = basis.0;
    for _ in 0..4 {
        let changed = lll_pass(&mut b, &mut u, delta);
        // Re-derive the rows from the exact integer combination.
        b = combine(&u, basis).0;
        if !changed {
            break;
        }
    }
    // Keep the orientation of the input basis.
    if int_det(&u) < 0 {
        u[2] = u[2].map(|x| -x);
        b[2] = b[2].map(|x| -x);
    }
    Reduction { reduced: Mat3(b), transform: u }
}

/// LLL reduction (`δ = 0.99`) with the integer transition matrix.
pub fn lll_reduce(basis: &Mat3) -> Result<Reduction> {
    let det = basis.det();
    if !(det.abs() >= 1e-8) || !basis.is_finite() {
        return Err(Error::SingularMatrix { det });
    }
    Ok(lll_unchecked(basis, LLL_DELTA))
}

pub fn reduce_basis(basis: &Mat3) -> Result<Mat3> {
    Ok(lll_reduce(basis)?.reduced)
}

/// Visit every nonzero `c` with `‖c · rows‖² ≤ radius2`, passing `(c, ‖c·rows‖²)`.
///
/// Fincke–Pohst enumeration; `rows` should be reduced for efficiency.
pub fn enumerate_ball(rows: &Mat3, radius2: f64, mut visit: impl FnMut([i64; 3], f64)) {
    let g = gso(&rows.0);
    let r2 = radius2 * (1.0 + 1e-10) + 1e-300;
    let (mu, b2) = (&g.mu, &g.b2);
    let span = |rem: f64, bi: f64| if rem <= 0.0 { 0.0 } else { (rem / bi).sqrt() };
    let s2 = span(r2, b2[2]);
    for c2 in (-s2.floor() as i64)..=(s2.floor() as i64) {
        let y2 = c2 as f64;
        let rem2 = r2 - y2 * y2 * b2[2];
        if rem2 < 0.0 {
            continue;
        }
        let center1 = -mu[2][1] * y2;
        let s1 = span(rem2, b2[1]);
        for c1 in ((center1 - s1).ceil() as i64)..=((center1 + s1).floor() as i64) {
            let y1 = c1 as f64 + mu[2][1] * y2;
            let rem1 = rem2 - y1 * y1 * b2[1];
            if rem1 < 0.0 {
                continue;
            }
            let center0 = -(mu[1][0] * c1 as f64 + mu[2][0] * y2);
            let s0 = span(rem1, b2[0]);
            for c0 in ((center0 - s0).ceil() as i64)..=((center0 + s0).floor() as i64) {
                if c0 == 0 && c1 == 0 && c2 == 0 {
                    continue;
                }
                let c = [c0, c1, c2];
                let v = rows.left_mul_int(&c);
                let l2 = dot(&v, &v);
                if l2 <= r2 {
                    visit(c, l2);
                }
            }
        }
    }
}

/// Flip `n` so its first nonzero coordinate is positive.
pub fn sign_normalize(n: [i64; 3]) -> [i64; 3] {
    match n.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => [-n[0], -n[1], -n[2]],
        _ => n,
    }
}

/// Tie-break between equal-length shortest vectors: the sign-normalised
/// coefficient vector that is lexicographically largest wins, so `ℤ³`
/// yields `(1, 0, 0)`.
pub fn prefer_coeffs(a: &[i64; 3], b: &[i64; 3]) -> Ordering {
    b.cmp(a)
}

/// `true` when squared lengths `a` and `b` agree up to the tie tolerance.
pub fn lengths_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_REL * a.max(b)
}

/// A shortest nonzero vector and its coefficients in the input basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortVectorResult {
    pub coeffs: [i64; 3],
    pub vector: Vec3,
    pub length: f64,
}

fn shortest_in(red: &Reduction) -> ShortVectorResult {
    let rows = &red.reduced;
    let r0 = rows.row(0);
    let radius2 = dot(&r0, &r0);
    let mut cands: Vec<([i64; 3], f64)> = Vec::with_capacity(8);
    enumerate_ball(rows, radius2, |c, l2| cands.push((c, l2)));
    let min = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let mut best: Option<([i64; 3], [i64; 3])> = None;
    for (c, l2) in cands {
        if !lengths_tied(l2, min) {
            continue;
        }
        // coefficients relative to the input basis: n = c · U
        let raw: [i64; 3] = std::array::from_fn(|j| (0..3).map(|i| c[i] * red.transform[i][j]).sum());
        let n = sign_normalize(raw);
        let c = if n == raw { c } else { c.map(|x| -x) };
        match best {
            Some((bn, _)) if prefer_coeffs(&n, &bn) != Ordering::Less => {}
            _ => best = Some((n, c)),
        }
    }
    let (n, c) = best.expect("first reduced row is always a candidate");
    let vector = rows.left_mul_int(&c);
    ShortVectorResult { coeffs: n, vector, length: norm(&vector) }
}

/// A point of `X₃`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub basis: Mat3,
    pub reduced: Mat3,
    pub transform: IntMat3,
    pub gram: Mat3,
    pub shortest: ShortVectorResult,
    pub alpha1: f64,
}

impl LatticePoint {
    /// Lattice spanned by the rows of `basis`, which must have determinant 1.
    pub fn new(basis: Mat3) -> Result<Self> {
        let det = basis.det();
        if !basis.is_finite() || !((det - 1.0).abs() <= UNIMODULAR_TOL) {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Self::from_trusted(basis))
    }

    /// Skips the determinant check; for bases that are unimodular by
    /// construction but whose determinant cannot be evaluated accurately
    /// (products with large spin images).
    pub fn from_trusted(basis: Mat3) -> Self {
        let red = lll_unchecked(&basis, LLL_DELTA);
        let shortest = shortest_in(&red);
        let gram = red.reduced * red.reduced.transpose();
        LatticePoint {
            basis,
            reduced: red.reduced,
            transform: red.transform,
            gram,
            alpha1: 1.0 / shortest.length,
            shortest,
        }
    }

    pub fn standard() -> Self {
        Self::from_trusted(Mat3::identity())
    }

    /// The point `x · ι(h)`, basis `g · ι(h)`.
    pub fn translate(&self, h: &HElement) -> Self {
        Self::from_trusted(self.basis * h.image)
    }

    pub fn right_mul(&self, m: &Mat3) -> Result<Self> {
        if !((m.det() - 1.0).abs() <= UNIMODULAR_TOL) {
            return Err(Error::NotUnimodular { det: m.det() });
        }
        Ok(Self::from_trusted(self.basis * *m))
    }

    pub fn reduction(&self) -> Reduction {
        Reduction { reduced: self.reduced, transform: self.transform }
    }
}

pub fn shortest_vector(p: &LatticePoint) -> ShortVectorResult {
    p.shortest
}

pub fn alpha1(p: &LatticePoint) -> f64 {
    p.alpha1
}

/// `max(0, 3 log α₁)`, normalised so that `μ{dist > s} ≍ e^{−s}`.
pub fn cusp_distance(p: &LatticePoint) -> f64 {
    (3.0 * p.alpha1.ln()).max(0.0)
}

fn round_mat(m: &Mat3) -> Option<IntMat3> {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let x = m.0[i][j].round();
            if !x.is_finite() || x.abs() > 1e12 {
                return None;
            }
            out[i][j] = x as i64;
        }
    }
    Some(out)
}

/// Minimum of `metric(B_p⁻¹ γ B_q − I)` over integer `γ` of determinant one
/// near `round(B_p B_q⁻¹)`, each row perturbed by offsets in `{−1, 0, 1}³`.
fn candidate_distance(p: &LatticePoint, q: &LatticePoint, metric: impl Fn(&Mat3) -> f64) -> f64 {
    let (bp, bq) = (&p.reduced, &q.reduced);
    let (Ok(bp_inv), Ok(bq_inv)) = (bp.inv(), bq.inv()) else {
        return f64::INFINITY;
    };
    let Some(g0) = round_mat(&(bp * &bq_inv)) else {
        return f64::INFINITY;
    };
    let eval = |g: &IntMat3| -> f64 {
        if int_det(g) != 1 {
            return f64::INFINITY;
        }
        metric(&(bp_inv * Mat3::from_integer(g) * *bq).sub(&Mat3::identity()))
    };
    let mut best = eval(&g0);
    for row in 0..3 {
        for code in 0..27 {
            let off = [code % 3 - 1, (code / 3) % 3 - 1, code / 9 - 1];
            if off == [0, 0, 0] {
                continue;
            }
            let mut g = g0;
            for c in 0..3 {
                g[row][c] += off[c];
            }
            best = best.min(eval(&g));
        }
    }
    best
}

/// Surrogate distance on `X₃`: `min_γ ‖B_p⁻¹ γ B_q − I‖₂` over integer
/// `γ` of determinant one near `round(B_p B_q⁻¹)`, with `B` the reduced
/// bases. Accurate for distances below about `0.5`; `+∞` if no candidate is
/// unimodular.
pub fn point_distance(p: &LatticePoint, q: &LatticePoint) -> f64 {
    candidate_distance(p, q, |e| e.hs_norm())
}

/// Orthogonal basis of the Lie algebra of `ι(H)` (each of HS norm `√2`).
const H_ALGEBRA: [Mat3; 3] = [
    Mat3([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
    Mat3([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]),
    Mat3([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]),
];

/// Distance from `p·H₁` to `q`, to first order: the displacement
/// `B_p⁻¹ γ B_q − I` loses its component along the Lie algebra of `ι(H)`,
/// up to HS length 1 (the unit neighbourhood `H₁`). Small balls in this
/// distance have measure `≍ r⁵`, five being the codimension of `H`.
pub fn thickened_point_distance(p: &LatticePoint, q: &LatticePoint) -> f64 {
    candidate_distance(p, q, |e| {
        let total2 = e.0.iter().flatten().map(|x| x * x).sum::<f64>();
        let along2 = H_ALGEBRA
            .iter()
            .map(|x| {
                let c = x.0.iter().flatten().zip(e.0.iter().flatten()).map(|(a, b)| a * b).sum::<f64>();
                c * c / 2.0
            })
            .sum::<f64>();
        let along = along2.sqrt();
        let perp2 = (total2 - along2).max(0.0);
        let excess = (along - 1.0).max(0.0);
        (perp2 + excess * excess).sqrt()
    })
}

/// `ln √2`: Siegel-set slack for consecutive Gram–Schmidt lengths,
/// `d_{i+1} ≥ d_i/√2` (holds for any LLL basis with `δ ≥ 3/4`).
const SIEGEL_C: f64 = 0.5 * LN_2;

fn random_rotation(rng: &mut RandomStream) -> Mat3 {
    let q = loop {
        let q = [rng.normal(), rng.normal(), rng.normal(), rng.normal()];
        let n = (q.iter().map(|x| x * x).sum::<f64>()).sqrt();
        if n > 1e-6 {
            break q.map(|x| x / n);
        }
    };
    let [w, x, y, z] = q;
    Mat3([
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ])
}

/// Draw a basis from the Siegel set with Haar density.
fn siegel_proposal(rng: &mut RandomStream) -> Mat3 {
    let c = SIEGEL_C;
    // u = ln d₁ has marginal ∝ e^{c+3u} − e^{6u−2c} on (−∞, c].
    let u = loop {
        let u = c + rng.uniform_open0().ln() / 3.0;
        if rng.uniform() < 1.0 - (3.0 * (u - c)).exp() {
            break u;
        }
    };
    // w = ln d₂ | u has density ∝ e^{2w} on [u − c, (c − u)/2].
    let (lo, hi) = (u - c, 0.5 * (c - u));
    let (elo, ehi) = ((2.0 * lo).exp(), (2.0 * hi).exp());
    let w = 0.5 * (elo + rng.uniform() * (ehi - elo)).ln();
    let d = [u.exp(), w.exp(), (-u - w).exp()];
    let m10 = rng.uniform() - 0.5;
    let m20 = rng.uniform() - 0.5;
    let m21 = rng.uniform() - 0.5;
    let l = Mat3([[d[0], 0.0, 0.0], [m10 * d[0], d[1], 0.0], [m20 * d[0], m21 * d[1], d[2]]]);
    l * random_rotation(rng)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn is_primitive(c: &[i64; 3]) -> bool {
    gcd(gcd(c[0], c[1]), c[2]) == 1
}

fn pair_is_primitive(a: &[i64; 3], b: &[i64; 3]) -> bool {
    let m01 = a[0] * b[1] - a[1] * b[0];
    let m02 = a[0] * b[2] - a[2] * b[0];
    let m12 = a[1] * b[2] - a[2] * b[1];
    gcd(gcd(m01, m02), m12) == 1
}

/// Number of bases of `Λ`, counted up to the signs of their first two
/// vectors, that lie in the Siegel set used by the Haar sampler.
pub fn siegel_basis_count(p: &LatticePoint) -> usize {
    let rows = &p.reduced;
    let sqrt2 = 2f64.sqrt();
    let mut firsts = Vec::new();
    enumerate_ball(rows, 2.0, |c, l2| {
        if is_primitive(&c) && sign_normalize(c) == c {
            firsts.push((c, l2));
        }
    });
    let mut count = 0;
    for (c1, l1) in firsts {
        let d1 = l1.sqrt();
        let d2min2 = 0.5 * l1;
        let d2max2 = sqrt2 / d1;
        if d2min2 > d2max2 {
            continue;
        }
        let v1 = rows.left_mul_int(&c1);
        enumerate_ball(rows, d2max2 + 0.25 * l1, |c2, l2| {
            if sign_normalize(c2) != c2 {
                return;
            }
            let w = rows.left_mul_int(&c2);
            let mu = dot(&w, &v1) / l1;
            if mu.abs() > 0.5 {
                return;
            }
            let d2sq = l2 - mu * mu * l1;
            if d2sq < d2min2 || d2sq > d2max2 {
                return;
            }
            if pair_is_primitive(&c1, &c2) {
                count += 1;
            }
        });
    }
    count
}

/// Haar-distributed point of `X₃`.
pub fn sample_x3_haar(rng: &mut RandomStream) -> LatticePoint {
    loop {
        let basis = siegel_proposal(rng);
        let p = LatticePoint::from_trusted(basis);
        let m = siegel_basis_count(&p);
        if m > 0 && rng.uniform() * (m as f64) < 1.0 {
            return p;
        }
    }
}

/// Normalised Gaussian matrix `G / det(G)^{1/3}`. Absolutely continuous
/// with respect to Haar measure but not Haar: its density vanishes in the
/// cusp, so tail statistics of `α₁` differ from the Haar ones.
pub fn sample_x3_gaussian(rng: &mut RandomStream) -> LatticePoint {
    loop {
        let mut g = Mat3::zero();
        g.0.iter_mut().flatten().for_each(|x| *x = rng.normal());
        let mut det = g.det();
        if det.abs() < 1e-6 {
            continue;
        }
        if det < 0.0 {
            g.0[0] = g.0[0].map(|x| -x);
            det = -det;
        }
        return LatticePoint::from_trusted(g.scale(det.powf(-1.0 / 3.0)));
    }
}
