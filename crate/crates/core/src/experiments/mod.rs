//! Orbit experiments on `X₃`: hitting shrinking targets, critical
//! exponents, excursion series, ergodic-average decay, target measures and
//! the orbit route to small values of quadratic forms.
//!
//! Every routine takes a [`RandomStream`](crate::RandomStream) and splits it
//! per task, so outputs are identical for any number of worker threads.

pub mod fit;
pub mod hitting;
pub mod loglaw;
pub mod measure;
pub mod met;
pub mod oppenheim;
pub mod search;
pub mod targets;

pub use fit::{fit_line, fit_loglog, geometric_ladder, quantile, quarter_decade, LinearFit};
pub use hitting::{critical_exponent_estimate, hit_test, in_exponent_set, ExponentEstimate, HitResult, LadderEntry};
pub use loglaw::{beta_series, BetaPoint, BetaTarget, ExcursionSeries};
pub use measure::{haar_sample_set, target_measure_estimate, MeasureEstimate, MeasurePoint};
pub use met::{met_decay, MetDecayReport, MetPoint, MetSettings, Observable};
pub use oppenheim::{
    effective_oppenheim, estimate_tau, orbit_short_vector_search, tau_to_eta, Engine, OppenheimCertificate, OrbitHit,
    TauFit, TauPoint,
};
pub use search::search_candidates;
pub use targets::{CuspRule, TargetFamily, POINT_CODIM};
