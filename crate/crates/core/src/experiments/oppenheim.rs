//! Small values of `Q₀^g` from short vectors on the orbit `ℤ³ g ι(H)`.
//!
//! If `α₁(ℤ³ g ι(h)) ≥ T^{η/3}` for some `‖h‖ ≤ T`, the shortest vector
//! `v = n g ι(h)` has `|Q₀^g(n)| = |Q₀(v)| ≤ ‖v‖² ≤ T^{−2η/3}` and
//! `‖n‖ ≤ ‖v‖ ‖ι(h)⁻¹‖ ‖g⁻¹‖ ≤ ‖g⁻¹‖₂ T^{(3−η)/3}`.

use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::error::{domain, Error, Result};
use crate::forms::{form_from_g, min_form_value_direct, FormValueResult, NormChoice, QuadForm, S0};
use crate::lattice::{LatticePoint, ShortVectorResult, UNIMODULAR_TOL};
use crate::linalg::Mat3;
use crate::rng::RandomStream;
use crate::spin::HElement;

use super::fit::{fit_loglog, LinearFit};
use super::search::{first_match, search_candidates};

/// Residual allowed when recovering `n = v (g ι(h))⁻¹` in floating point.
pub const ROUNDING_TOL: f64 = 1e-4;
const CERT_SLACK: f64 = 1e-6;

/// `η = 3τ/(τ + 2)`: `α₁ ≥ T^{η/3}` then gives `|Q(n)| ≪ T̃^{−τ}` with
/// `T̃ ≍ T^{(3−η)/3}`.
pub fn tau_to_eta(tau: f64) -> f64 {
    3.0 * tau / (tau + 2.0)
}

fn check_unimodular(g: &Mat3) -> Result<()> {
    let det = g.det();
    if !g.is_finite() || !((det - 1.0).abs() <= UNIMODULAR_TOL) {
        return Err(Error::NotUnimodular { det });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitHit {
    pub h: HElement,
    pub vector: ShortVectorResult,
    pub alpha1: f64,
    pub candidate_index: usize,
}

/// First `h` of the search plan of `H_T` with `α₁(ℤ³ g ι(h)) ≥ T^{η/3}`.
/// The vector's coefficients are relative to the basis `g ι(h)`.
pub fn orbit_short_vector_search(
    g: &Mat3,
    radius: f64,
    eta: f64,
    budget: usize,
    rng: &RandomStream,
) -> Result<Option<OrbitHit>> {
    check_unimodular(g)?;
    let x = LatticePoint::from_trusted(*g);
    let level = radius.powf(eta / 3.0);
    let cands = search_candidates(radius, budget, rng)?;
    Ok(first_match(&cands, |h| {
        let p = x.translate(h);
        (p.alpha1 >= level).then_some((*h, p.shortest, p.alpha1))
    })
    .map(|(i, (h, vector, alpha1))| OrbitHit { h, vector, alpha1, candidate_index: i }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OppenheimCertificate {
    pub tau: f64,
    pub eta: f64,
    pub radius: f64,
    pub h: HElement,
    pub n: [i64; 3],
    pub value: f64,
    pub vector_length: f64,
    pub rounding_residual: f64,
    pub n_norm: f64,
    /// `‖g⁻¹‖₂ T^{(3−η)/3}`, the bound that follows from `n = v ι(h)⁻¹ g⁻¹`.
    pub norm_bound: f64,
    /// `‖g‖₂ T^{(3−η)/3}`, the bound with `‖g‖₂` in place of `‖g⁻¹‖₂`.
    pub alt_norm_bound: f64,
    pub alt_norm_bound_holds: bool,
    /// `T^{−2η/3}`.
    pub value_bound: f64,
    pub elapsed: f64,
}

impl OppenheimCertificate {
    /// `(n, Q(n))` as a search result over the ball of radius `norm_bound`.
    pub fn as_form_value(&self) -> FormValueResult {
        FormValueResult { n: self.n, value: self.value, radius: self.norm_bound, elapsed: self.elapsed }
    }
}

/// Run the orbit search with `η = 3τ/(τ+2)` and turn a hit into an integer
/// vector with a re-verified certificate. `Ok(None)` means the budget was
/// exhausted.
pub fn effective_oppenheim(
    g: &Mat3,
    tau: f64,
    radius: f64,
    budget: usize,
    norm: NormChoice,
    rng: &RandomStream,
) -> Result<Option<OppenheimCertificate>> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(domain(format!("τ = {tau} must lie in (0, 1)")));
    }
    if !(radius >= 1.0) {
        return Err(domain(format!("radius {radius} must be at least 1")));
    }
    let start = Instant::now();
    let eta = tau_to_eta(tau);
    let Some(hit) = orbit_short_vector_search(g, radius, eta, budget, rng)? else {
        return Ok(None);
    };
    let n = hit.vector.coeffs;
    // exact inverse of the spin image: ι(h)⁻¹ = S₀ ι(h)ᵗ S₀
    let image_inv = S0 * hit.h.image.transpose() * S0;
    let g_inv = g.inv()?;
    let n_real = (image_inv * g_inv).left_mul(&hit.vector.vector);
    let rounding_residual = (0..3).map(|i| (n_real[i] - n[i] as f64).abs()).fold(0.0, f64::max);
    if !(rounding_residual < ROUNDING_TOL) {
        return Err(Error::RoundingFailure { residual: rounding_residual });
    }
    let q = form_from_g(g)?;
    let value = q.eval_int(&n);
    let growth = radius.powf((3.0 - eta) / 3.0);
    let norm_bound = g_inv.hs_norm() * growth;
    let alt_norm_bound = g.hs_norm() * growth;
    let value_bound = radius.powf(-2.0 * eta / 3.0);
    let n_norm = norm.int_norm(&n);
    if !(value.abs() <= value_bound * (1.0 + CERT_SLACK)) {
        return Err(Error::CertificateFailure(format!("|Q(n)| = {} exceeds {value_bound}", value.abs())));
    }
    if !(n_norm <= norm_bound * (1.0 + CERT_SLACK)) {
        return Err(Error::CertificateFailure(format!("‖n‖ = {n_norm} exceeds {norm_bound}")));
    }
    Ok(Some(OppenheimCertificate {
        tau,
        eta,
        radius,
        h: hit.h,
        n,
        value,
        vector_length: hit.vector.length,
        rounding_residual,
        n_norm,
        norm_bound,
        alt_norm_bound,
        alt_norm_bound_holds: n_norm <= alt_norm_bound * (1.0 + CERT_SLACK),
        value_bound,
        elapsed: start.elapsed().as_secs_f64(),
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Direct,
    Orbit,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Direct => "direct",
            Engine::Orbit => "orbit",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauPoint {
    pub radius: f64,
    /// `+∞` when the orbit engine found no vector inside the ball.
    pub min_abs_q: f64,
    pub n: [i64; 3],
    pub elapsed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauFit {
    pub engine: Engine,
    pub points: Vec<TauPoint>,
    /// `None` when the form represents zero (slope `−∞`).
    pub fit: Option<LinearFit>,
    pub represents_zero: bool,
}

impl TauFit {
    pub fn slope(&self) -> f64 {
        match self.fit {
            Some(f) => f.slope,
            None => f64::NEG_INFINITY,
        }
    }
}

fn orbit_minimum(
    q: &QuadForm,
    g: &Mat3,
    radius: f64,
    budget: usize,
    norm: NormChoice,
    rng: &RandomStream,
) -> Result<TauPoint> {
    let start = Instant::now();
    let x = LatticePoint::from_trusted(*g);
    let cands = search_candidates(radius, budget, rng)?;
    use rayon::prelude::*;
    let best = cands
        .par_iter()
        .filter_map(|h| {
            let n = x.translate(h).shortest.coeffs;
            norm.contains(&n, radius).then(|| (q.eval_int(&n), n))
        })
        .min_by(crate::forms::candidate_order);
    let (value, n) = best.unwrap_or((f64::INFINITY, [0, 0, 0]));
    Ok(TauPoint { radius, min_abs_q: value.abs(), n, elapsed: start.elapsed().as_secs_f64() })
}

/// Fit `ln min |Q(n)|` against `ln T` along the ladder.
pub fn estimate_tau(
    q: &QuadForm,
    ladder: &[f64],
    engine: Engine,
    budget: usize,
    norm: NormChoice,
    rng: &RandomStream,
) -> Result<TauFit> {
    if ladder.len() < 5 {
        return Err(domain("τ estimation needs a ladder of at least 5 radii"));
    }
    let mut points = Vec::with_capacity(ladder.len());
    for (i, &radius) in ladder.iter().enumerate() {
        let p = match engine {
            Engine::Direct => {
                let r = min_form_value_direct(q, radius, norm)?;
                TauPoint { radius, min_abs_q: r.value.abs(), n: r.n, elapsed: r.elapsed }
            }
            Engine::Orbit => {
                let g = q.source_g.ok_or_else(|| domain("orbit engine needs a form given as Q₀^g"))?;
                orbit_minimum(q, &g, radius, budget, norm, &rng.split(i as u64))?
            }
        };
        points.push(p);
    }
    let represents_zero = points.iter().any(|p| p.min_abs_q == 0.0);
    let fit = if represents_zero {
        None
    } else {
        let usable: Vec<&TauPoint> = points.iter().filter(|p| p.min_abs_q.is_finite()).collect();
        let t: Vec<f64> = usable.iter().map(|p| p.radius).collect();
        let m: Vec<f64> = usable.iter().map(|p| p.min_abs_q).collect();
        Some(fit_loglog(&t, &m)?)
    };
    Ok(TauFit { engine, points, fit, represents_zero })
}
