//! `oppenheim`: command-line front end for the orbit experiments.

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "oppenheim", version, about = "Shrinking targets and small values of ternary forms on SL3(Z)\\SL3(R)")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit ln min|Q(n)| against ln T for Haar-random forms.
    ///
    /// forms.csv: form_id,g11..g33,T,min_abs_q,n1,n2,n3,engine,elapsed_s;
    /// slopes.csv: form_id,g11..g33,slope,intercept,residual,represents_zero.
    OppenheimScan,
    /// Orbit pipeline with certificates for one form (config `g` or a Haar sample).
    ///
    /// oppenheim_one.csv: T,tau,eta,status,n1..n3,value,n_norm,norm_bound,
    /// alt_norm_bound,alt_norm_bound_holds,value_bound,direct_radius,direct_min_abs_q,elapsed_s.
    OppenheimOne,
    /// Hit tests of A_{T^eta} along the ladder.
    ///
    /// hits.csv: point_id,T,eta,hit,witness_index,theta,t,theta_prime,witness_norm.
    TargetsHit,
    /// Bracket the critical exponent by bisection.
    ///
    /// ladder.csv: point_id,T,max_depth,eta_reached,hit; estimates.csv: point_id,eta_lower,eta_upper,saturated.
    CriticalExponent,
    /// Cusp excursions beta_T(x).
    ///
    /// series.csv: point_id,T,raw,beta,ratio (ratio = beta/ln T).
    LoglawCusp,
    /// Approach to the standard lattice, beta_T(x, Z^3).
    ///
    /// series.csv: point_id,T,raw,beta,ratio (ratio = -ln beta/ln T).
    LoglawPoint,
    /// Decay of ball averages.
    ///
    /// series.csv: T,measure,raw_l2,noise_floor,l2_error,half_floor_ratio.
    MetDecay,
    /// Monte Carlo measure of A_t.
    ///
    /// measure.csv: t,hits,fraction.
    Measure,
    /// Haar samples of X3.
    ///
    /// samples.csv: sample_id,b11..b33,alpha1,cusp_distance,c1,c2,c3.
    Sample,
    /// Run the brute-force oracle suites; exit status 1 on failure.
    Selftest {
        /// Replace ab - cd by ab + cd in the spin cover (negative control).
        #[arg(long, hide = true)]
        corrupt_spin: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::OppenheimScan => "oppenheim-scan",
            Command::OppenheimOne => "oppenheim-one",
            Command::TargetsHit => "targets-hit",
            Command::CriticalExponent => "critical-exponent",
            Command::LoglawCusp => "loglaw-cusp",
            Command::LoglawPoint => "loglaw-point",
            Command::MetDecay => "met-decay",
            Command::Measure => "measure",
            Command::Sample => "sample",
            Command::Selftest { .. } => "selftest",
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = RunConfig::resolve(cli.command.name(), &cli.common)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
    let workers = pool.current_num_threads();
    pool.install(|| match &cli.command {
        Command::OppenheimScan => commands::oppenheim_scan(&cfg),
        Command::OppenheimOne => commands::oppenheim_one(&cfg),
        Command::TargetsHit => commands::targets_hit(&cfg),
        Command::CriticalExponent => commands::critical_exponent(&cfg),
        Command::LoglawCusp => commands::loglaw(&cfg, false),
        Command::LoglawPoint => commands::loglaw(&cfg, true),
        Command::MetDecay => commands::met(&cfg),
        Command::Measure => commands::measure(&cfg),
        Command::Sample => commands::sample(&cfg),
        Command::Selftest { corrupt_spin } => commands::selftest(&cfg, *corrupt_spin),
    })?;
    if !matches!(cli.command, Command::Selftest { .. }) {
        output::OutputDir { path: cfg.out.join(&cfg.command) }.run_info(workers, start.elapsed().as_secs_f64())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oppenheim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
