use proptest::prelude::*;

use oppenheim_core::experiments::{geometric_ladder, in_exponent_set, TargetFamily};
use oppenheim_core::forms::{form_from_g, min_form_value_direct, NormChoice, S0};
use oppenheim_core::lattice::{sample_x3_haar, shortest_vector, sign_normalize, LatticePoint};
use oppenheim_core::linalg::{kak_decompose, KakCoords, Mat3, Sl2};
use oppenheim_core::spin::{ball_measure, h_norm, min_norm, norm_from_t, spin_cover};
use oppenheim_core::{HElement, RandomStream};

fn kak() -> impl Strategy<Value = KakCoords> {
    (0.0..std::f64::consts::TAU, 0.0..6.0f64, 0.0..std::f64::consts::TAU).prop_map(|(a, t, b)| KakCoords::new(a, t, b))
}

fn lattice() -> impl Strategy<Value = LatticePoint> {
    any::<u64>().prop_map(|s| sample_x3_haar(&mut RandomStream::new(s)))
}

/// Products of elementary integer matrices: random elements of SL₃(ℤ).
fn unimodular() -> impl Strategy<Value = [[i64; 3]; 3]> {
    prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 1..6).prop_map(|ops| {
        let mut m = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        for (i, j, k) in ops {
            if i != j {
                let src = m[j];
                for (dst, s) in m[i].iter_mut().zip(src) {
                    *dst += k * s;
                }
            }
        }
        m
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kak_round_trip(c in kak()) {
        let h = c.compose();
        let back = kak_decompose(&h).compose();
        prop_assert!(h.max_abs_diff(&back) <= 1e-9 * (1.0 + c.t.exp()), "{h:?} vs {back:?}");
        prop_assert!(rel_close(h_norm(&h), norm_from_t(c.t), 1e-10));
    }

    #[test]
    fn spin_cover_is_multiplicative(a in kak(), b in kak()) {
        let (h1, h2) = (a.compose(), b.compose());
        let lhs = spin_cover(&(h1 * h2));
        let rhs = spin_cover(&h1) * spin_cover(&h2);
        let scale = lhs.hs_norm().max(1.0);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * scale);
    }

    #[test]
    fn spin_image_preserves_q0(c in kak()) {
        let m = spin_cover(&c.compose());
        let s = m * S0 * m.transpose();
        prop_assert!(s.max_abs_diff(&S0) <= 1e-9 * m.hs_norm().powi(2));
    }

    /// Q^{g·ι(h)} = Q^g: the orbit moves the lattice, not the form.
    #[test]
    fn form_is_h_invariant(x in lattice(), c in kak()) {
        let c = KakCoords::new(c.theta, c.t.min(3.0), c.theta_prime);
        let h = HElement::from_kak(c);
        let q = form_from_g(&x.basis).unwrap();
        let moved = form_from_g(&(x.basis * h.image)).unwrap();
        prop_assert!(q.sym.max_abs_diff(&moved.sym) <= 1e-8 * h.norm.powi(2));
    }

    #[test]
    fn shortest_vector_ignores_basis_choice(x in lattice(), u in unimodular()) {
        let y = LatticePoint::new(Mat3::from_integer(&u) * x.basis).unwrap();
        prop_assert!(rel_close(shortest_vector(&x).length, shortest_vector(&y).length, 1e-9));
    }

    #[test]
    fn alpha1_respects_hermite(x in lattice()) {
        prop_assert!(x.alpha1 >= 2f64.powf(-1.0 / 6.0) - 1e-12);
    }

    #[test]
    fn form_minimum_shrinks_with_radius(x in lattice(), r in 1.0..12.0f64, extra in 0.0..8.0f64, sup in any::<bool>()) {
        let norm = if sup { NormChoice::Sup } else { NormChoice::Euclidean };
        let q = form_from_g(&x.basis).unwrap();
        let small = min_form_value_direct(&q, r, norm).unwrap();
        let large = min_form_value_direct(&q, r + extra, norm).unwrap();
        prop_assert!(large.value.abs() <= small.value.abs());
        prop_assert!(norm.contains(&small.n, r));
        prop_assert!(rel_close(q.eval_int(&small.n), small.value, 1e-12));
    }

    #[test]
    fn targets_are_nested(x in lattice(), t in 1.0..1e4f64, k in 1.0..100.0f64) {
        let families = [
            TargetFamily::cusp(),
            TargetFamily::frozen(1.1),
            TargetFamily::point(LatticePoint::standard(), 0.05),
        ];
        for f in &families {
            prop_assert!(!f.contains(&x, t * k) || f.contains(&x, t), "{}", f.label());
        }
    }

    /// Membership in {h : x·ι(h) ∈ A_{‖h‖^η}} can only be lost as η grows.
    #[test]
    fn exponent_sets_shrink_with_eta(x in lattice(), c in kak(), eta in 0.0..2.0f64, step in 0.0..1.0f64) {
        let h = HElement::from_kak(c);
        let cusp = TargetFamily::cusp();
        prop_assert!(!in_exponent_set(&x, &h, eta + step, &cusp) || in_exponent_set(&x, &h, eta, &cusp));
    }

    #[test]
    fn ball_measure_increases(r in 1.8..1e6f64, k in 1.0001..10.0f64) {
        prop_assert!(ball_measure(r * k).unwrap() > ball_measure(r).unwrap());
    }

    #[test]
    fn sign_normalize_is_idempotent(n in prop::array::uniform3(-50i64..50)) {
        let s = sign_normalize(n);
        prop_assert_eq!(sign_normalize(s), s);
        prop_assert!(s == n || s == n.map(|v| -v));
    }

    #[test]
    fn ladders_are_geometric(start in 1.0..1e3f64, ratio in 1.01..10.0f64, count in 1usize..12) {
        let l = geometric_ladder(start, ratio, count).unwrap();
        prop_assert_eq!(l.len(), count);
        prop_assert!(l.windows(2).all(|w| w[1] > w[0] && rel_close(w[1] / w[0], ratio, 1e-8)));
    }
}

#[test]
fn identity_has_the_minimal_norm() {
    assert_eq!(h_norm(&Sl2::identity()), min_norm());
}
