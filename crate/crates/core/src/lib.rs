//! Shrinking targets for the spin-embedded `SL₂(ℝ)` action on the space of
//! unimodular lattices in ℝ³, logarithm laws, and an effective search for
//! small values of indefinite ternary quadratic forms.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops read better than iterator chains for 3×3 matrix code.
#![allow(clippy::needless_range_loop)]
// Targets carry a whole lattice point by value; they are built once per run.
#![allow(clippy::large_enum_variant)]

pub mod error;
pub mod experiments;
pub mod forms;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod rng;
pub mod selftest;
pub mod spin;

pub use error::{Error, Result};
pub use experiments::{ExcursionSeries, ExponentEstimate, MetDecayReport, TargetFamily};
pub use forms::{FormValueResult, NormChoice, QuadForm};
pub use lattice::{LatticePoint, ShortVectorResult};
pub use linalg::{KakCoords, Mat3, Sl2, Vec3};
pub use rng::RandomStream;
pub use spin::{HBall, HElement};
