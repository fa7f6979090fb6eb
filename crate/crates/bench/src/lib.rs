//! Fixtures shared by the benchmarks.

use oppenheim_core::experiments::TargetFamily;
use oppenheim_core::forms::QuadForm;
use oppenheim_core::lattice::{sample_x3_haar, LatticePoint};
use oppenheim_core::spin::sample_h_ball;
use oppenheim_core::{HElement, RandomStream};

pub const SEED: u64 = 20_240_601;

/// Haar-random lattices.
pub fn lattices(n: usize) -> Vec<LatticePoint> {
    let root = RandomStream::new(SEED);
    (0..n as u64).map(|i| sample_x3_haar(&mut root.split_named("lattice", i))).collect()
}

/// Forms `Q0(v g)` for Haar-random `g`.
pub fn forms(n: usize) -> Vec<QuadForm> {
    lattices(n).iter().map(|x| QuadForm::from_g(&x.basis).expect("unimodular")).collect()
}

/// Elements of `H_T`.
pub fn h_elements(radius: f64, n: usize) -> Vec<HElement> {
    let root = RandomStream::new(SEED);
    (0..n as u64).map(|i| sample_h_ball(radius, &mut root.split_named("h", i)).expect("radius ≥ √3")).collect()
}

pub fn cusp() -> TargetFamily {
    TargetFamily::cusp()
}

pub fn stream() -> RandomStream {
    RandomStream::new(SEED)
}
