//! Decay of ball averages `π_T f` toward `∫ f dμ`.
//!
//! `π_T f(x)` is estimated from `N` Haar points of `H_T`; the squared L²
//! error over `x` then carries a sampling term `Var_h f / N` that is
//! estimated per `x` and subtracted, leaving the dynamical part.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{cusp_distance, sample_x3_haar, LatticePoint};
use crate::rng::RandomStream;
use crate::spin::HBall;

use super::fit::{fit_loglog, LinearFit};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    /// `1{α₁ ≤ c}`.
    AlphaBelow {
        c: f64,
    },
    /// `1{cusp_distance ≤ s}`, the complement of a cusp neighbourhood.
    CuspComplement {
        s: f64,
    },
    /// `exp(−((cusp_distance − center)/width)²)`.
    Bump {
        center: f64,
        width: f64,
    },
    Constant {
        value: f64,
    },
}

impl Observable {
    pub fn standard() -> Self {
        Observable::AlphaBelow { c: 1.2 }
    }

    pub fn eval(&self, x: &LatticePoint) -> f64 {
        match *self {
            Observable::AlphaBelow { c } => f64::from(x.alpha1 <= c),
            Observable::CuspComplement { s } => f64::from(cusp_distance(x) <= s),
            Observable::Bump { center, width } => (-((cusp_distance(x) - center) / width).powi(2)).exp(),
            Observable::Constant { value } => value,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Observable::AlphaBelow { c } => format!("1{{alpha1 <= {c}}}"),
            Observable::CuspComplement { s } => format!("1{{cusp_distance <= {s}}}"),
            Observable::Bump { center, width } => format!("exp(-((cusp_distance - {center})/{width})^2)"),
            Observable::Constant { value } => format!("constant {value}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetSettings {
    pub n_points: usize,
    pub ball_samples: usize,
    pub mean_samples: usize,
}

impl Default for MetSettings {
    fn default() -> Self {
        MetSettings { n_points: 200, ball_samples: 1000, mean_samples: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetPoint {
    pub radius: f64,
    pub measure: f64,
    /// `sqrt(mean_x (π̂_T f(x) − μ̂(f))²)`, sampling noise included.
    pub raw_l2: f64,
    /// Estimated sampling contribution to the squared error.
    pub noise_floor: f64,
    /// `sqrt(max(raw² − floor, 0))`.
    pub l2_error: f64,
    /// Floor estimated from the first half of the ball samples over the
    /// full-sample floor; `≈ 2` for `1/N` noise.
    pub half_floor_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetDecayReport {
    pub observable: Observable,
    pub description: String,
    pub mean: f64,
    pub settings: MetSettings,
    pub series: Vec<MetPoint>,
    /// Fit of `ln l2_error` against `ln m(H_T)`; absent when fewer than two
    /// errors are positive.
    pub fit: Option<LinearFit>,
    /// `−slope` of the fit.
    pub kappa: Option<f64>,
}

impl MetDecayReport {
    pub fn errors_decreasing(&self) -> bool {
        self.series.windows(2).all(|w| w[1].l2_error <= w[0].l2_error)
    }
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (m, var)
}

pub fn met_decay(f: &Observable, ladder: &[f64], settings: &MetSettings, rng: &RandomStream) -> Result<MetDecayReport> {
    let MetSettings { n_points, ball_samples, mean_samples } = *settings;
    if n_points == 0 || ball_samples < 2 || mean_samples < 2 || ladder.is_empty() {
        return Err(Error::Config("met_decay needs n_points ≥ 1, ball and mean samples ≥ 2, nonempty ladder".into()));
    }
    let values: Vec<f64> = (0..mean_samples as u64)
        .into_par_iter()
        .map(|k| f.eval(&sample_x3_haar(&mut rng.split_named("mean", k))))
        .collect();
    let (mean, var_mean) = mean_var(&values);
    let mean_noise = var_mean / mean_samples as f64;

    let xs: Vec<LatticePoint> = (0..n_points as u64).map(|j| sample_x3_haar(&mut rng.split_named("x", j))).collect();

    let mut series = Vec::with_capacity(ladder.len());
    for (i, &radius) in ladder.iter().enumerate() {
        let ball = HBall::new(radius)?;
        // per x: (π̂ full, floor full, π̂ half, floor half)
        let per_x: Vec<[f64; 4]> = xs
            .par_iter()
            .enumerate()
            .map(|(j, x)| {
                let mut r = rng.split_named("ball", (i * n_points + j) as u64);
                let v: Vec<f64> = (0..ball_samples).map(|_| f.eval(&x.translate(&ball.sample(&mut r)))).collect();
                let (m, var) = mean_var(&v);
                let half = &v[..ball_samples / 2];
                let (mh, varh) = mean_var(half);
                [m, var / ball_samples as f64, mh, varh / half.len() as f64]
            })
            .collect();
        let n = n_points as f64;
        let raw2 = per_x.iter().map(|p| (p[0] - mean).powi(2)).sum::<f64>() / n;
        let floor = per_x.iter().map(|p| p[1]).sum::<f64>() / n + mean_noise;
        let floor_half = per_x.iter().map(|p| p[3]).sum::<f64>() / n + mean_noise;
        series.push(MetPoint {
            radius,
            measure: ball.measure,
            raw_l2: raw2.sqrt(),
            noise_floor: floor,
            l2_error: (raw2 - floor).max(0.0).sqrt(),
            half_floor_ratio: if floor > 0.0 { floor_half / floor } else { f64::NAN },
        });
    }

    let pos: Vec<&MetPoint> = series.iter().filter(|p| p.l2_error > 0.0).collect();
    let fit = if pos.len() >= 2 {
        let m: Vec<f64> = pos.iter().map(|p| p.measure).collect();
        let e: Vec<f64> = pos.iter().map(|p| p.l2_error).collect();
        Some(fit_loglog(&m, &e)?)
    } else {
        None
    };
    Ok(MetDecayReport {
        observable: *f,
        description: f.describe(),
        mean,
        settings: *settings,
        series,
        kappa: fit.map(|f| -f.slope),
        fit,
    })
}
