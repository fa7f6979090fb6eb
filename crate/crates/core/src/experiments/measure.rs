//! Monte Carlo measure of shrinking targets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{sample_x3_haar, LatticePoint};
use crate::rng::RandomStream;

use super::fit::{fit_loglog, LinearFit};
use super::targets::TargetFamily;

pub const MIN_MEASURE_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurePoint {
    pub t: f64,
    pub hits: usize,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub family: String,
    pub n_samples: usize,
    pub points: Vec<MeasurePoint>,
    /// Log-log fit over the points with at least one hit.
    pub fit: Option<LinearFit>,
    pub approximate: bool,
}

/// Haar samples of `X₃`, one split stream per sample.
pub fn haar_sample_set(n: usize, rng: &RandomStream) -> Vec<LatticePoint> {
    (0..n as u64).into_par_iter().map(|k| sample_x3_haar(&mut rng.split(k))).collect()
}

/// `μ(A_t)` along `t_ladder` from one shared Haar sample.
pub fn target_measure_estimate(
    family: &TargetFamily,
    t_ladder: &[f64],
    n_samples: usize,
    rng: &RandomStream,
) -> Result<MeasureEstimate> {
    if n_samples < MIN_MEASURE_SAMPLES {
        return Err(Error::Config(format!("measure estimates need at least {MIN_MEASURE_SAMPLES} samples")));
    }
    let xs = haar_sample_set(n_samples, rng);
    let points: Vec<MeasurePoint> = t_ladder
        .iter()
        .map(|&t| {
            let hits = xs.par_iter().filter(|x| family.contains(x, t)).count();
            MeasurePoint { t, hits, fraction: hits as f64 / n_samples as f64 }
        })
        .collect();
    let pos: Vec<&MeasurePoint> = points.iter().filter(|p| p.hits > 0).collect();
    let fit = if pos.len() >= 2 {
        let t: Vec<f64> = pos.iter().map(|p| p.t).collect();
        let f: Vec<f64> = pos.iter().map(|p| p.fraction).collect();
        Some(fit_loglog(&t, &f)?)
    } else {
        None
    };
    Ok(MeasureEstimate {
        family: family.label().to_string(),
        n_samples,
        points,
        fit,
        approximate: family.is_approximate(),
    })
}
