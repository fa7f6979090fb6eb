//! Run configuration: per-command defaults, overridden by a JSON file,
//! overridden by flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use oppenheim_core::experiments::{quarter_decade, Engine, Observable};
use oppenheim_core::forms::NormChoice;
use oppenheim_core::rng::DEFAULT_SEED;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NormArg {
    Euclidean,
    Sup,
}

impl From<NormArg> for NormChoice {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Euclidean => NormChoice::Euclidean,
            NormArg::Sup => NormChoice::Sup,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Cusp,
    Point,
    Frozen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EngineArg {
    Direct,
    Orbit,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Direct => Engine::Direct,
            EngineArg::Orbit => Engine::Orbit,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Root seed (default 0x0dd5eed520160003).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Norm bounding integer vectors.
    #[arg(long, value_enum, global = true)]
    pub norm: Option<NormArg>,
    /// First radius of the geometric ladder.
    #[arg(long = "t-start", global = true)]
    pub t_start: Option<f64>,
    /// Ladder ratio (> 1).
    #[arg(long = "t-ratio", global = true)]
    pub t_ratio: Option<f64>,
    /// Number of ladder radii.
    #[arg(long = "t-count", global = true)]
    pub t_count: Option<usize>,
    /// Size of the grid (and of the random part) of each search of H_T.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Number of forms, points or samples, depending on the command.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory; each command writes into its own subdirectory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON file with any of the configuration fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Oppenheim exponent τ in (0, 1).
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Target exponent η ≥ 0.
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    /// Target family for targets-hit, critical-exponent and measure.
    #[arg(long, value_enum, global = true)]
    pub family: Option<FamilyArg>,
    /// Search engine for oppenheim-scan.
    #[arg(long, value_enum, global = true)]
    pub engine: Option<EngineArg>,
}

/// Contents of a `--config` file; every field optional.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub norm: Option<NormArg>,
    pub t_start: Option<f64>,
    pub t_ratio: Option<f64>,
    pub t_count: Option<usize>,
    pub budget: Option<usize>,
    pub samples: Option<usize>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub tau: Option<f64>,
    pub eta: Option<f64>,
    pub family: Option<FamilyArg>,
    pub engine: Option<EngineArg>,
    pub delta: Option<f64>,
    pub frozen_threshold: Option<f64>,
    pub ball_samples: Option<usize>,
    pub mean_samples: Option<usize>,
    pub observable: Option<Observable>,
    /// Rows of `g` for oppenheim-one (default: a Haar sample).
    pub g: Option<[[f64; 3]; 3]>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved configuration, echoed into every summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub norm: NormArg,
    pub t_start: f64,
    pub t_ratio: f64,
    pub t_count: usize,
    pub budget: usize,
    pub samples: usize,
    /// Not echoed, so summaries do not depend on where they were written.
    #[serde(skip)]
    pub out: PathBuf,
    pub tau: f64,
    pub eta: f64,
    pub family: FamilyArg,
    pub engine: EngineArg,
    pub delta: f64,
    pub frozen_threshold: f64,
    pub ball_samples: usize,
    pub mean_samples: usize,
    pub observable: Observable,
    pub g: Option<[[f64; 3]; 3]>,
    /// Not echoed: results never depend on it.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn defaults(command: &str) -> Self {
        let q = quarter_decade();
        let mut c = RunConfig {
            command: command.to_string(),
            seed: DEFAULT_SEED,
            norm: NormArg::Euclidean,
            t_start: 100.0,
            t_ratio: q,
            t_count: 9,
            budget: 10_000,
            samples: 100,
            out: PathBuf::from("out"),
            tau: 0.5,
            eta: 0.8,
            family: FamilyArg::Cusp,
            engine: EngineArg::Direct,
            delta: 0.05,
            frozen_threshold: 1.1,
            ball_samples: 1_000,
            mean_samples: 100_000,
            observable: Observable::standard(),
            g: None,
            workers: None,
        };
        match command {
            "oppenheim-scan" => {
                c.t_start = 10.0;
                c.samples = 50;
                c.budget = 1_000;
            }
            "oppenheim-one" => {
                c.t_start = 10.0;
                c.t_count = 5;
                c.samples = 1;
            }
            "critical-exponent" => c.samples = 5,
            "loglaw-cusp" | "loglaw-point" => c.samples = 20,
            "met-decay" => {
                c.t_start = 10f64.powf(1.5);
                c.samples = 200;
            }
            "measure" => {
                c.t_start = 2.0;
                c.t_ratio = 25f64.powf(0.25);
                c.t_count = 5;
                c.samples = 100_000;
            }
            "sample" => c.samples = 1_000,
            _ => {}
        }
        c
    }

    pub fn resolve(command: &str, args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let mut c = Self::defaults(command);
        // a point-family measure run moves the default ladder to small balls
        let family = args.family.or(file.family);
        if command == "measure" && family == Some(FamilyArg::Point) {
            c.t_start = 100.0;
            c.t_ratio = 10f64.sqrt();
        }
        macro_rules! layer {
            ($($f:ident),*) => {$(
                if let Some(v) = file.$f.clone() { c.$f = v; }
                if let Some(v) = args.$f.clone() { c.$f = v; }
            )*};
        }
        layer!(seed, norm, t_start, t_ratio, t_count, budget, samples, out, tau, eta, family, engine);
        if let Some(v) = file.delta {
            c.delta = v;
        }
        if let Some(v) = file.frozen_threshold {
            c.frozen_threshold = v;
        }
        if let Some(v) = file.ball_samples {
            c.ball_samples = v;
        }
        if let Some(v) = file.mean_samples {
            c.mean_samples = v;
        }
        if let Some(v) = file.observable {
            c.observable = v;
        }
        c.g = file.g;
        c.workers = args.workers.or(file.workers);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if !(self.t_start.is_finite() && self.t_start > 0.0) {
            return bad("--t-start must be positive");
        }
        if !(self.t_ratio.is_finite() && self.t_ratio > 1.0) {
            return bad("--t-ratio must exceed 1");
        }
        if self.t_count == 0 || self.budget == 0 || self.samples == 0 {
            return bad("counts (--t-count, --budget, --samples) must be at least 1");
        }
        if self.workers == Some(0) {
            return bad("--workers must be at least 1");
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return bad("--eta must be nonnegative");
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return bad("--tau must lie in (0, 1)");
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return bad("delta must be nonnegative");
        }
        if self.ball_samples < 2 || self.mean_samples < 2 {
            return bad("ball_samples and mean_samples must be at least 2");
        }
        Ok(())
    }

    pub fn norm_choice(&self) -> NormChoice {
        self.norm.into()
    }
}
