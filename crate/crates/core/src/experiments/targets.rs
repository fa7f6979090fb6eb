//! Shrinking-target families on `X₃`.

use serde::{Deserialize, Serialize};

use crate::lattice::{thickened_point_distance, LatticePoint};

/// `d₀ = dim G − dim H = 8 − 3`.
pub const POINT_CODIM: f64 = 5.0;

/// Threshold rule of a cusp family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CuspRule {
    /// `A_t = {α₁ ≥ t^{1/3}}`.
    Shrinking,
    /// `A_t = {α₁ ≥ c}` for every `t` (non-shrinking control).
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TargetFamily {
    Cusp {
        rule: CuspRule,
    },
    /// `A_t = {x : dist(x·H₁, y) < t^{−1/d₀} + δ}`.
    Point {
        center: LatticePoint,
        delta: f64,
    },
}

impl TargetFamily {
    pub fn cusp() -> Self {
        TargetFamily::Cusp { rule: CuspRule::Shrinking }
    }

    pub fn frozen(threshold: f64) -> Self {
        TargetFamily::Cusp { rule: CuspRule::Fixed(threshold) }
    }

    /// Contains every lattice: the threshold sits below the Hermite bound.
    pub fn whole_space() -> Self {
        Self::frozen(0.5 * 2f64.powf(-1.0 / 6.0))
    }

    pub fn point(center: LatticePoint, delta: f64) -> Self {
        TargetFamily::Point { center, delta: delta.max(0.0) }
    }

    /// `μ(A_t) ≍ t^{−1}` for both shrinking families.
    pub fn decay_exponent(&self) -> f64 {
        match self {
            TargetFamily::Cusp { rule: CuspRule::Fixed(_) } => 0.0,
            _ => 1.0,
        }
    }

    /// Point targets rely on the surrogate distance.
    pub fn is_approximate(&self) -> bool {
        matches!(self, TargetFamily::Point { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            TargetFamily::Cusp { rule: CuspRule::Shrinking } => "cusp",
            TargetFamily::Cusp { rule: CuspRule::Fixed(_) } => "frozen",
            TargetFamily::Point { .. } => "point",
        }
    }

    pub fn contains(&self, x: &LatticePoint, t: f64) -> bool {
        match self {
            TargetFamily::Cusp { rule: CuspRule::Shrinking } => x.alpha1 >= t.cbrt(),
            TargetFamily::Cusp { rule: CuspRule::Fixed(c) } => x.alpha1 >= *c,
            TargetFamily::Point { center, delta } => {
                thickened_point_distance(x, center) < t.powf(-1.0 / POINT_CODIM) + delta
            }
        }
    }

    /// `sup{t : x ∈ A_t}`: `+∞` when `x` lies in every target, `0` when in
    /// none.
    pub fn depth(&self, x: &LatticePoint) -> f64 {
        match self {
            TargetFamily::Cusp { rule: CuspRule::Shrinking } => x.alpha1.powi(3),
            TargetFamily::Cusp { rule: CuspRule::Fixed(c) } => {
                if x.alpha1 >= *c {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            TargetFamily::Point { center, delta } => {
                let d = thickened_point_distance(x, center) - delta;
                if d <= 0.0 {
                    f64::INFINITY
                } else {
                    d.powf(-POINT_CODIM)
                }
            }
        }
    }
}
