//! Exhaustive oracle checks run by `oppenheim selftest`.

use std::f64::consts::TAU;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::forms::{form_from_g, min_form_value_direct, NormChoice};
use crate::lattice::{sample_x3_haar, shortest_vector};
use crate::linalg::{kak_compose, KakCoords, Mat3, Sl2};
use crate::oracle::{brute_force_form_min, brute_force_shortest};
use crate::rng::RandomStream;
use crate::spin::SpinMap;

pub const SPIN_CASES: usize = 10_000;
pub const LATTICE_CASES: usize = 1_000;
pub const FORM_CASES: usize = 100;
pub const FORM_RADIUS: f64 = 25.0;
const TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub checks: Vec<CheckOutcome>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn timed(name: &str, f: impl FnOnce() -> Result<String, String>) -> CheckOutcome {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckOutcome { name: name.to_string(), passed, detail, elapsed: start.elapsed().as_secs_f64() }
}

fn random_sl2(rng: &mut RandomStream) -> Sl2 {
    let c = KakCoords::new(TAU * rng.uniform(), 3.0 * rng.uniform(), TAU * rng.uniform());
    let h = kak_compose(&c);
    if rng.uniform() < 0.5 {
        -h
    } else {
        h
    }
}

fn q0(v: &[f64; 3]) -> f64 {
    v[0] * v[0] + v[1] * v[1] - v[2] * v[2]
}

fn scale_of(m: &Mat3) -> f64 {
    m.0.iter().flatten().fold(1.0_f64, |a, x| a.max(x.abs()))
}

/// Form preservation, determinant, homomorphism and kernel of `spin`.
pub fn spin_battery(spin: SpinMap, n: usize, rng: &RandomStream) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    out.push(timed("spin: Q0 preservation", || {
        let mut r = rng.split_named("q0", 0);
        for i in 0..n {
            let h = random_sl2(&mut r);
            let v = [r.normal(), r.normal(), r.normal()];
            let len = (v.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let v = v.map(|x| x / len);
            let w = spin(&h).left_mul(&v);
            let scale = 1.0 + w.iter().map(|x| x * x).sum::<f64>();
            if (q0(&w) - q0(&v)).abs() > TOL * scale {
                return Err(format!("case {i}: Q0(v) = {} but Q0(v·ι(h)) = {} for h = {h:?}", q0(&v), q0(&w)));
            }
        }
        Ok(format!("{n} cases"))
    }));
    out.push(timed("spin: determinant", || {
        let mut r = rng.split_named("det", 0);
        for i in 0..n {
            let h = random_sl2(&mut r);
            let m = spin(&h);
            let s = scale_of(&m);
            if (m.det() - 1.0).abs() > TOL * s * s * s {
                return Err(format!("case {i}: det ι(h) = {}", m.det()));
            }
        }
        Ok(format!("{n} cases"))
    }));
    out.push(timed("spin: homomorphism", || {
        let mut r = rng.split_named("hom", 0);
        for i in 0..n {
            let (a, b) = (random_sl2(&mut r), random_sl2(&mut r));
            let lhs = spin(&(a * b));
            let rhs = spin(&a) * spin(&b);
            let err = lhs.max_abs_diff(&rhs);
            if err > TOL * scale_of(&rhs) {
                return Err(format!("case {i}: ι(h₁h₂) − ι(h₁)ι(h₂) = {err:e}"));
            }
        }
        Ok(format!("{n} pairs"))
    }));
    out.push(timed("spin: kernel", || {
        let m = spin(&-Sl2::identity());
        if m == Mat3::identity() {
            Ok("ι(−I) = I".into())
        } else {
            Err(format!("ι(−I) = {m:?}"))
        }
    }));
    out
}

/// Fast shortest vectors against the `|cᵢ| ≤ 10` box search.
pub fn lattice_oracle(n: usize, rng: &RandomStream) -> CheckOutcome {
    timed("lattice: shortest vector vs box oracle", || {
        let bad = (0..n as u64).into_par_iter().find_first(|&i| {
            let p = sample_x3_haar(&mut rng.split_named("lattice", i));
            let fast = shortest_vector(&p);
            let slow = brute_force_shortest(&p.basis, 10);
            fast.coeffs != slow.coeffs || (fast.length - slow.length).abs() > 1e-9
        });
        match bad {
            None => Ok(format!("{n} lattices")),
            Some(i) => Err(format!("lattice {i} disagrees with the box oracle")),
        }
    })
}

/// Slicing search against the full-ball search.
pub fn form_oracle(n: usize, radius: f64, rng: &RandomStream) -> CheckOutcome {
    timed("forms: slicing search vs ball oracle", || {
        for i in 0..n as u64 {
            let g = sample_x3_haar(&mut rng.split_named("form", i)).basis;
            let q = form_from_g(&g).map_err(|e| e.to_string())?;
            let fast = min_form_value_direct(&q, radius, NormChoice::Euclidean).map_err(|e| e.to_string())?;
            let (n_slow, v_slow) = brute_force_form_min(&q, radius, NormChoice::Euclidean);
            if fast.n != n_slow || fast.value != v_slow {
                return Err(format!(
                    "form {i}: slicing {:?} ({}) vs oracle {:?} ({})",
                    fast.n, fast.value, n_slow, v_slow
                ));
            }
        }
        Ok(format!("{n} forms at T = {radius}"))
    })
}

pub fn run_selftest(seed: u64, spin: SpinMap) -> SelftestReport {
    let rng = RandomStream::new(seed).split_named("selftest", 0);
    let mut checks = spin_battery(spin, SPIN_CASES, &rng);
    checks.push(lattice_oracle(LATTICE_CASES, &rng));
    checks.push(form_oracle(FORM_CASES, FORM_RADIUS, &rng));
    SelftestReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{spin_cover, spin_cover_sign_flipped};

    #[test]
    fn genuine_map_passes() {
        let rng = RandomStream::new(71);
        assert!(spin_battery(spin_cover, 2000, &rng).iter().all(|c| c.passed));
        assert!(lattice_oracle(50, &rng).passed);
        assert!(form_oracle(5, 12.0, &rng).passed);
    }

    #[test]
    fn flipped_sign_is_caught() {
        let rng = RandomStream::new(72);
        let checks = spin_battery(spin_cover_sign_flipped, 2000, &rng);
        let first = checks.iter().find(|c| !c.passed).unwrap();
        assert_eq!(first.name, "spin: Q0 preservation");
    }
}
