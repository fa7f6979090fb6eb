//! Small dense linear algebra: 3×3 real matrices, 2×2 unimodular matrices and
//! the Cartan decomposition `h = k_θ · a_t · k_θ′` of SL₂(ℝ).
//!
//! Vectors are row vectors throughout; a matrix acts on the right (`v · A`).

use std::f64::consts::{PI, TAU};
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Tolerance on `|det - 1|` for matrices asserted to be unimodular.
pub const DET_TOL: f64 = 1e-9;
/// Below this `|det|` a matrix is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn sup_norm(a: &Vec3) -> f64 {
    a[0].abs().max(a[1].abs()).max(a[2].abs())
}

/// Dense 3×3 real matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const fn identity() -> Self {
        Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub const fn zero() -> Self {
        Mat3([[0.0; 3]; 3])
    }

    pub const fn diag(a: f64, b: f64, c: f64) -> Self {
        Mat3([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub const fn from_rows(rows: [Vec3; 3]) -> Self {
        Mat3(rows)
    }

    pub fn from_integer(m: &[[i64; 3]; 3]) -> Self {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = m[i][j] as f64;
            }
        }
        Mat3(out)
    }

    pub fn row(&self, i: usize) -> Vec3 {
        self.0[i]
    }

    pub fn rows(&self) -> &[Vec3; 3] {
        &self.0
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat3([[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Inverse via the adjugate.
    pub fn inv(&self) -> Result<Self> {
        let m = &self.0;
        let det = self.det();
        if !(det.abs() > SINGULAR_TOL) {
            return Err(Error::SingularMatrix { det });
        }
        let r = 1.0 / det;
        Ok(Mat3([
            [
                (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * r,
                (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * r,
                (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * r,
            ],
            [
                (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * r,
                (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * r,
                (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * r,
            ],
            [
                (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * r,
                (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * r,
                (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * r,
            ],
        ]))
    }

    /// Hilbert–Schmidt (Frobenius) norm, `sqrt(tr(Aᵗ A))`.
    pub fn hs_norm(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Operator 2-norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        let ata = self.transpose() * *self;
        let ev = symmetric_eigenvalues(&ata);
        ev.iter().cloned().fold(0.0_f64, f64::max).max(0.0).sqrt()
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &Vec3) -> Vec3 {
        let m = &self.0;
        [
            v[0] * m[0][0] + v[1] * m[1][0] + v[2] * m[2][0],
            v[0] * m[0][1] + v[1] * m[1][1] + v[2] * m[2][1],
            v[0] * m[0][2] + v[1] * m[1][2] + v[2] * m[2][2],
        ]
    }

    /// Integer row vector times matrix.
    pub fn left_mul_int(&self, n: &[i64; 3]) -> Vec3 {
        self.left_mul(&[n[0] as f64, n[1] as f64, n[2] as f64])
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.0;
        out.iter_mut().flatten().for_each(|x| *x *= s);
        Mat3(out)
    }

    pub fn sub(&self, other: &Mat3) -> Self {
        let mut out = self.0;
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] -= other.0[i][j];
            }
        }
        Mat3(out)
    }

    pub fn add(&self, other: &Mat3) -> Self {
        let mut out = self.0;
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] += other.0[i][j];
            }
        }
        Mat3(out)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Mat3) -> f64 {
        self.sub(other).0.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn is_unimodular(&self, tol: f64) -> bool {
        (self.det() - 1.0).abs() <= tol
    }

    /// Matrix exponential by scaling and squaring with a Taylor core.
    pub fn exp(&self) -> Self {
        let n = self.hs_norm();
        let squarings = if n > 0.5 { (n / 0.5).log2().ceil() as u32 } else { 0 };
        let a = self.scale(1.0 / f64::powi(2.0, squarings as i32));
        let mut term = Mat3::identity();
        let mut sum = Mat3::identity();
        for k in 1..=18 {
            term = (term * a).scale(1.0 / k as f64);
            sum = sum.add(&term);
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }
}

impl Mul for Mat3 {
    type Output = Mat3;

    fn mul(self, rhs: Mat3) -> Mat3 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Mat3(out)
    }
}

impl Mul for &Mat3 {
    type Output = Mat3;

    fn mul(self, rhs: &Mat3) -> Mat3 {
        *self * *rhs
    }
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    a * b
}

pub fn mat3_inv(a: &Mat3) -> Result<Mat3> {
    a.inv()
}

pub fn hs_norm(a: &Mat3) -> f64 {
    a.hs_norm()
}

/// Eigenvalues of a symmetric 3×3 matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(s: &Mat3) -> Vec3 {
    let mut a = s.0;
    for _sweep in 0..50 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        let scale = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
        }
    }
    [a[0][0], a[1][1], a[2][2]]
}

/// Element of SL₂(ℝ), `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sl2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Sl2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let h = Sl2 { a, b, c, d };
        if !(h.det() - 1.0).abs().le(&DET_TOL) {
            return Err(Error::NotUnimodular { det: h.det() });
        }
        Ok(h)
    }

    pub const fn identity() -> Self {
        Sl2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// `k_θ = [[cos θ, sin θ], [−sin θ, cos θ]]`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Sl2 { a: c, b: s, c: -s, d: c }
    }

    /// `a_t = diag(e^{t/2}, e^{−t/2})`.
    pub fn boost(t: f64) -> Self {
        let e = (0.5 * t).exp();
        Sl2 { a: e, b: 0.0, c: 0.0, d: 1.0 / e }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inv(&self) -> Self {
        Sl2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn transpose(&self) -> Self {
        Sl2 { a: self.a, b: self.c, c: self.b, d: self.d }
    }

    pub fn max_abs_diff(&self, o: &Sl2) -> f64 {
        (self.a - o.a).abs().max((self.b - o.b).abs()).max((self.c - o.c).abs()).max((self.d - o.d).abs())
    }
}

impl Mul for Sl2 {
    type Output = Sl2;

    fn mul(self, r: Sl2) -> Sl2 {
        Sl2 {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

impl Neg for Sl2 {
    type Output = Sl2;

    fn neg(self) -> Sl2 {
        Sl2 { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

/// Cartan coordinates `(θ, t, θ′)` with `h = k_θ · a_t · k_θ′`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KakCoords {
    pub theta: f64,
    pub t: f64,
    pub theta_prime: f64,
}

/// Below this `t` the decomposition is treated as a pure rotation.
const KAK_FLAT_T: f64 = 1e-12;

fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl KakCoords {
    pub fn new(theta: f64, t: f64, theta_prime: f64) -> Self {
        KakCoords { theta, t, theta_prime }
    }

    pub fn compose(&self) -> Sl2 {
        kak_compose(self)
    }
}

pub fn kak_compose(c: &KakCoords) -> Sl2 {
    Sl2::rotation(c.theta) * Sl2::boost(c.t) * Sl2::rotation(c.theta_prime)
}

/// Cartan decomposition of `h`.
///
/// Canonical form: `t ≥ 0`, angles in `[0, 2π)`; for `t = 0` the rotation is
/// folded into `θ` and `θ′ = 0`; for `t > 0`, `θ ∈ [0, π)` (the pair
/// `(θ + π, θ′ + π)` names the same element).
pub fn kak_decompose(h: &Sl2) -> KakCoords {
    // 2×2 SVD h = R(φ) diag(σ₁, σ₂) R(ψ) with R(x) = [[cos x, −sin x], [sin x, cos x]].
    let e = 0.5 * (h.a + h.d);
    let f = 0.5 * (h.a - h.d);
    let g = 0.5 * (h.c + h.b);
    let k = 0.5 * (h.c - h.b);
    let q = e.hypot(k);
    let r = f.hypot(g);
    let sigma = q + r;
    let a1 = g.atan2(f);
    let a2 = k.atan2(e);
    let psi = 0.5 * (a2 - a1);
    let phi = 0.5 * (a2 + a1);
    // k_θ = R(−θ).
    let mut theta = reduce_angle(-phi);
    let mut theta_prime = reduce_angle(-psi);
    let mut t = 2.0 * sigma.ln();
    if t <= KAK_FLAT_T {
        t = 0.0;
        theta = reduce_angle(theta + theta_prime);
        theta_prime = 0.0;
    } else if theta >= PI {
        theta = reduce_angle(theta - PI);
        theta_prime = reduce_angle(theta_prime + PI);
    }
    KakCoords { theta, t, theta_prime }
}
