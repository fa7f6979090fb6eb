//! The spin cover `ι: SL₂(ℝ) → SO(Q₀)`, the norm it induces on `H = SL₂(ℝ)`,
//! Haar measure in Cartan coordinates and Haar-uniform sampling of norm balls.
//!
//! `ι` is normalised to be a homomorphism, `ι(h₁h₂) = ι(h₁)ι(h₂)`, so that
//! `g ↦ g·ι(h)` is a right action of `H` on `SL₃(ℝ)`. The matrix below is the
//! symmetric-square representation written in the light-cone basis of
//! `Q₀ = x² + y² − z²`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{kak_compose, kak_decompose, KakCoords, Mat3, Sl2};
use crate::rng::RandomStream;

/// Exponents `d_H⁻ = d_H⁺` of ball growth `m(H_T) ≍ T`.
pub const BALL_GROWTH_EXPONENT: f64 = 1.0;

/// Smallest value of the norm, attained on `K = SO(2)`.
pub fn min_norm() -> f64 {
    3f64.sqrt()
}

/// Signature of a spin-cover implementation; lets the self-test swap in a
/// deliberately broken map.
pub type SpinMap = fn(&Sl2) -> Mat3;

pub fn spin_cover(h: &Sl2) -> Mat3 {
    let Sl2 { a, b, c, d } = *h;
    Mat3([
        [0.5 * (a * a - b * b - c * c + d * d), a * b - c * d, 0.5 * (a * a + b * b - c * c - d * d)],
        [a * c - b * d, b * c + a * d, a * c + b * d],
        [0.5 * (a * a - b * b + c * c - d * d), a * b + c * d, 0.5 * (a * a + b * b + c * c + d * d)],
    ])
}

/// Negative control for the self-test: `ab − cd` replaced by `ab + cd`.
#[doc(hidden)]
pub fn spin_cover_sign_flipped(h: &Sl2) -> Mat3 {
    let mut m = spin_cover(h);
    m.0[0][1] = h.a * h.b + h.c * h.d;
    m
}

/// `‖h‖ = ‖ι(h)⁻¹‖` (Hilbert–Schmidt), computed from the definition.
/// `ι(h)⁻¹ = ι(h⁻¹)` avoids a 3×3 inversion, whose cofactors cancel
/// catastrophically once the entries reach `e^{2t}`.
pub fn h_norm(h: &Sl2) -> f64 {
    spin_cover(&h.inv()).hs_norm()
}

/// Closed form of the norm in Cartan coordinates: `√(3 + 4 sinh² t)`.
pub fn norm_from_t(t: f64) -> f64 {
    let s = t.sinh();
    (3.0 + 4.0 * s * s).sqrt()
}

/// Point of `H` with cached Cartan coordinates, spin image and norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HElement {
    pub matrix: Sl2,
    pub kak: KakCoords,
    pub image: Mat3,
    pub norm: f64,
}

impl HElement {
    pub fn new(matrix: Sl2) -> Self {
        let image = spin_cover(&matrix);
        HElement { matrix, kak: kak_decompose(&matrix), image, norm: h_norm(&matrix) }
    }

    pub fn from_kak(kak: KakCoords) -> Self {
        let matrix = kak_compose(&kak);
        let image = spin_cover(&matrix);
        HElement { matrix, kak, image, norm: h_norm(&matrix) }
    }

    pub fn identity() -> Self {
        Self::new(Sl2::identity())
    }
}

/// Haar density `sinh t` in coordinates `dθ dθ′ dt`.
pub fn haar_density(c: &KakCoords) -> f64 {
    c.t.sinh()
}

/// Largest Cartan parameter in the ball `‖h‖ ≤ T`.
pub fn ball_t_max(radius: f64) -> Result<f64> {
    if !(radius >= min_norm()) {
        return Err(domain(format!("ball radius {radius} is below √3")));
    }
    let s2 = ((radius * radius - 3.0) / 4.0).max(0.0);
    Ok(s2.sqrt().asinh())
}

/// `cosh(t_max) − 1` for the ball of radius `T`, without cancellation.
fn cosh_t_max_minus_one(radius: f64) -> Result<f64> {
    ball_t_max(radius)?;
    let s2 = ((radius * radius - 3.0) / 4.0).max(0.0);
    // cosh t − 1 = sinh² t / (cosh t + 1)
    Ok(s2 / ((1.0 + s2).sqrt() + 1.0))
}

/// `m(H_T) = (2π)² (cosh t_max − 1)`.
pub fn ball_measure(radius: f64) -> Result<f64> {
    Ok(TAU * TAU * cosh_t_max_minus_one(radius)?)
}

/// The ball `H_T` together with its measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HBall {
    pub radius: f64,
    pub t_max: f64,
    pub measure: f64,
}

impl HBall {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > min_norm()) {
            return Err(domain(format!("ball radius {radius} must exceed √3")));
        }
        Ok(HBall { radius, t_max: ball_t_max(radius)?, measure: ball_measure(radius)? })
    }

    pub fn d_minus(&self) -> f64 {
        BALL_GROWTH_EXPONENT
    }

    pub fn d_plus(&self) -> f64 {
        BALL_GROWTH_EXPONENT
    }

    /// Cartan parameter at Haar quantile `u ∈ [0, 1]` of the ball.
    pub fn t_quantile(&self, u: f64) -> f64 {
        (u * self.cosh_minus_one()).ln_1p_acosh()
    }

    fn cosh_minus_one(&self) -> f64 {
        self.measure / (TAU * TAU)
    }

    /// Haar CDF of the Cartan parameter.
    pub fn t_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t >= self.t_max {
            1.0
        } else {
            (t.cosh() - 1.0) / self.cosh_minus_one()
        }
    }

    pub fn sample(&self, rng: &mut RandomStream) -> HElement {
        let theta = TAU * rng.uniform();
        let theta_prime = TAU * rng.uniform();
        let t = self.t_quantile(rng.uniform());
        HElement::from_kak(KakCoords { theta, t, theta_prime })
    }
}

trait AcoshOnePlus {
    fn ln_1p_acosh(self) -> f64;
}

impl AcoshOnePlus for f64 {
    /// `acosh(1 + x)` accurate for small `x`.
    fn ln_1p_acosh(self) -> f64 {
        let x = self.max(0.0);
        (x + (x * (x + 2.0)).sqrt()).ln_1p()
    }
}

/// Haar-uniform point of `H_T`.
pub fn sample_h_ball(radius: f64, rng: &mut RandomStream) -> Result<HElement> {
    Ok(HBall::new(radius)?.sample(rng))
}

/// Extremes of `‖h₀h‖ / ‖h‖` over a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioBounds {
    pub min: f64,
    pub max: f64,
}

pub fn norm_regularity_check(h0: &Sl2, sample: &[Sl2]) -> Result<RatioBounds> {
    if sample.is_empty() {
        return Err(domain("empty sample"));
    }
    let (min, max) = sample.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), h| {
        let r = h_norm(&(*h0 * *h)) / h_norm(h);
        (lo.min(r), hi.max(r))
    });
    Ok(RatioBounds { min, max })
}

/// Rotation `k_θ` for the angle grid, `θ ∈ [0, π)` suffices as `ι(−I) = I`.
pub fn angle_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| PI * i as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q0(v: &[f64; 3]) -> f64 {
        v[0] * v[0] + v[1] * v[1] - v[2] * v[2]
    }

    fn random_sl2(rng: &mut RandomStream) -> Sl2 {
        HBall::new(50.0).unwrap().sample(rng).matrix
    }

    #[test]
    fn identity_maps_to_identity() {
        assert!(spin_cover(&Sl2::identity()).max_abs_diff(&Mat3::identity()) < 1e-15);
        assert!((h_norm(&Sl2::identity()) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn quarter_rotation() {
        let m = spin_cover(&Sl2::rotation(PI / 2.0));
        assert!(m.max_abs_diff(&Mat3::diag(-1.0, -1.0, 1.0)) < 1e-15);
    }

    #[test]
    fn unit_boost() {
        let m = spin_cover(&Sl2::boost(1.0));
        let (ch, sh) = (1f64.cosh(), 1f64.sinh());
        let want = Mat3::from_rows([[ch, 0.0, sh], [0.0, 1.0, 0.0], [sh, 0.0, ch]]);
        assert!(m.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn kernel_is_minus_identity() {
        assert_eq!(spin_cover(&-Sl2::identity()), Mat3::identity());
    }

    #[test]
    fn norm_examples() {
        for th in [0.0, 0.3, PI / 4.0, 2.0] {
            assert!((h_norm(&Sl2::rotation(th)) - 3f64.sqrt()).abs() < 1e-14);
        }
        let n = h_norm(&Sl2::boost(1.0));
        assert!((n - norm_from_t(1.0)).abs() < 1e-13);
        assert!((n - 2.919_66).abs() < 1e-5);
    }

    #[test]
    fn norm_is_inversion_symmetric() {
        let mut rng = RandomStream::new(3);
        for _ in 0..1000 {
            let h = random_sl2(&mut rng);
            assert!((h_norm(&h) - h_norm(&h.inv())).abs() < 1e-8 * h_norm(&h));
        }
    }

    #[test]
    fn homomorphism_and_form_preservation() {
        let mut rng = RandomStream::new(4);
        let s0 = Mat3::diag(1.0, 1.0, -1.0);
        for _ in 0..2000 {
            let h1 = HBall::new(5.0).unwrap().sample(&mut rng).matrix;
            let h2 = HBall::new(5.0).unwrap().sample(&mut rng).matrix;
            let lhs = spin_cover(&(h1 * h2));
            let rhs = spin_cover(&h1) * spin_cover(&h2);
            assert!(lhs.max_abs_diff(&rhs) < 1e-8);
            let m = spin_cover(&h1);
            assert!((m.det() - 1.0).abs() < 1e-9);
            assert!((m * s0 * m.transpose()).max_abs_diff(&s0) < 1e-9);
            let v = [rng.normal(), rng.normal(), rng.normal()];
            let n = crate::linalg::norm(&v);
            let v = [v[0] / n, v[1] / n, v[2] / n];
            assert!((q0(&m.left_mul(&v)) - q0(&v)).abs() < 1e-8);
        }
    }

    #[test]
    fn flipped_sign_breaks_form_preservation() {
        let h = Sl2::new(1.3, 0.4, 0.2, (1.0 + 0.4 * 0.2) / 1.3).unwrap();
        let m = spin_cover_sign_flipped(&h);
        let s0 = Mat3::diag(1.0, 1.0, -1.0);
        assert!((m * s0 * m.transpose()).max_abs_diff(&s0) > 1e-3);
    }

    #[test]
    fn norm_is_k_bi_invariant() {
        let mut rng = RandomStream::new(5);
        for _ in 0..1000 {
            let h = random_sl2(&mut rng);
            let k1 = Sl2::rotation(TAU * rng.uniform());
            let k2 = Sl2::rotation(TAU * rng.uniform());
            let n = h_norm(&h);
            assert!((h_norm(&(k1 * h * k2)) - n).abs() < 1e-8 * n);
            assert!((n - norm_from_t(kak_decompose(&h).t)).abs() < 1e-8 * n);
        }
    }

    #[test]
    fn haar_density_values() {
        assert_eq!(haar_density(&KakCoords::new(0.0, 0.0, 0.0)), 0.0);
        assert!((haar_density(&KakCoords::new(0.0, 1.0, 0.0)) - 1.175_20).abs() < 1e-5);
        assert!((haar_density(&KakCoords::new(0.0, 2.0, 0.0)) - 3.626_86).abs() < 1e-5);
    }

    #[test]
    fn ball_measure_values() {
        assert_eq!(ball_measure(3f64.sqrt()).unwrap(), 0.0);
        let m = ball_measure(10.0).unwrap();
        let want = TAU * TAU * (101f64.sqrt() / 2.0 - 1.0);
        assert!((m - want).abs() < 1e-10 * want);
        assert!((m - 158.898).abs() < 1e-3);
        assert!(ball_measure(1.0).is_err());
        assert!(HBall::new(3f64.sqrt()).is_err());
    }

    #[test]
    fn ball_measure_matches_quadrature() {
        // Midpoint rule on sinh over [0, t_max], times (2π)².
        for radius in [2.0, 10.0, 300.0] {
            let tm = ball_t_max(radius).unwrap();
            let n = 200_000;
            let h = tm / n as f64;
            let integral: f64 = (0..n).map(|i| ((i as f64 + 0.5) * h).sinh() * h).sum();
            let m = ball_measure(radius).unwrap();
            assert!((TAU * TAU * integral - m).abs() < 1e-8 * m);
        }
    }

    #[test]
    fn samples_stay_in_ball() {
        let mut rng = RandomStream::new(6);
        let ball = HBall::new(1e3).unwrap();
        for _ in 0..20_000 {
            let h = ball.sample(&mut rng);
            assert!(h.norm <= 1e3 * (1.0 + 1e-8));
        }
    }

    #[test]
    fn regularity_identity_and_rotation() {
        let mut rng = RandomStream::new(8);
        let sample: Vec<Sl2> = (0..200).map(|_| random_sl2(&mut rng)).collect();
        let r = norm_regularity_check(&Sl2::identity(), &sample).unwrap();
        assert!((r.min - 1.0).abs() < 1e-12 && (r.max - 1.0).abs() < 1e-12);
        let r = norm_regularity_check(&Sl2::rotation(0.7), &sample).unwrap();
        assert!((r.min - 1.0).abs() < 1e-8 && (r.max - 1.0).abs() < 1e-8);
        assert!(norm_regularity_check(&Sl2::identity(), &[]).is_err());
    }

    #[test]
    fn regularity_bounded_by_operator_norms() {
        let mut rng = RandomStream::new(9);
        let ball = HBall::new(1e3).unwrap();
        let sample: Vec<Sl2> = (0..10_000).map(|_| ball.sample(&mut rng).matrix).collect();
        let a1 = Sl2::boost(1.0);
        let r = norm_regularity_check(&a1, &sample).unwrap();
        let img = spin_cover(&a1);
        let bound = img.op_norm() * img.inv().unwrap().op_norm();
        assert!(r.min > 0.0 && r.max.is_finite());
        assert!(r.max / r.min <= bound + 1e-6);
    }
}
