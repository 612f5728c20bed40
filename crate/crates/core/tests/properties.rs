use gensym_core::gensym::{detect, reconstruct_case2, SymmetryKind};
use gensym_core::io::{operator_to_json, parse_complex, parse_operator};
use gensym_core::models::{projection_example, random_hermitian, random_triple};
use gensym_core::operator::{commutator, iterated_commutator};
use gensym_core::spectral::{exp_neg, hermitian_eigh, EIGEN_RESIDUAL_BOUND};
use gensym_core::{Operator, Tolerance, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn herm(dim: usize, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Operator::new(random_hermitian(dim, &mut rng), "A").unwrap()
}

fn finite() -> impl Strategy<Value = f64> {
    any::<f64>().prop_filter("finite", |x| x.is_finite())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutator_parity(dim in 1usize..7, seed in any::<u64>(), n in 1usize..=5) {
        let h = herm(dim, seed);
        let m = herm(dim, seed ^ 0x9e37);
        let cn = iterated_commutator(&h, &m, n).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let defect = cn.adjoint().distance(&(&cn * sign));
        prop_assert!(defect <= 1e-12 * cn.frobenius_norm().max(1.0));
    }

    #[test]
    fn eigen_residuals(dim in 1usize..=64, seed in any::<u64>()) {
        let a = herm(dim, seed);
        let s = hermitian_eigh(&a, Tolerance::default()).unwrap();
        let (res, orth) = s.residuals(&a);
        prop_assert!(res <= EIGEN_RESIDUAL_BOUND * a.frobenius_norm());
        prop_assert!(orth <= EIGEN_RESIDUAL_BOUND);
        prop_assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn exp_multiplicative(
        dim in 1usize..10,
        seed in any::<u64>(),
        a in (-1.0f64..1.0, -3.0f64..3.0),
        b in (-1.0f64..1.0, -3.0f64..3.0),
    ) {
        let m = herm(dim, seed);
        let s = hermitian_eigh(&m, Tolerance::default()).unwrap();
        let (za, zb) = (C64::new(a.0, a.1), C64::new(b.0, b.1));
        let lhs = &exp_neg(&s, za) * &exp_neg(&s, zb);
        let rhs = exp_neg(&s, za + zb);
        prop_assert!(lhs.distance(&rhs) <= 1e-9 * rhs.frobenius_norm());
    }

    #[test]
    fn operator_json_round_trip(dim in 1usize..5, vals in prop::collection::vec((finite(), finite()), 16)) {
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            let (re, im) = vals[(i * dim + j) % vals.len()];
            C64::new(re, im)
        });
        let op = Operator::new(m, "x").unwrap();
        let back = parse_operator(operator_to_json(&op).as_bytes()).unwrap();
        for (p, q) in op.matrix().iter().zip(back.matrix().iter()) {
            prop_assert_eq!(p.re.to_bits(), q.re.to_bits());
            prop_assert_eq!(p.im.to_bits(), q.im.to_bits());
        }
    }

    #[test]
    fn complex_literal_round_trip(re in finite(), im in finite()) {
        let text = format!("{re}{}{}i", if im.is_sign_negative() { "-" } else { "+" }, im.abs());
        let z = parse_complex(&text).unwrap();
        prop_assert_eq!(z.re.to_bits(), re.to_bits());
        prop_assert_eq!(z.im.abs().to_bits(), im.abs().to_bits());
    }

    #[test]
    fn parsers_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..256)) {
        let _ = parse_operator(&bytes);
        if let Ok(s) = std::str::from_utf8(&bytes) {
            let _ = parse_complex(s);
        }
    }

    #[test]
    fn projection_identity(dim in 2usize..12, seed in any::<u64>()) {
        let b = projection_example(dim, seed).unwrap();
        let c1 = commutator(&b.h, &b.m).unwrap();
        let c3 = iterated_commutator(&b.h, &b.m, 3).unwrap();
        prop_assert!(c3.distance(&c1) <= 1e-11 * c1.frobenius_norm().max(1.0));
    }

    #[test]
    fn power_ladder(seed in any::<u64>(), g in prop::sample::select(vec![0.5, 1.0, 2.0])) {
        let b = random_triple(&[2, 3, 2, 1], C64::new(g, 0.0), seed).unwrap();
        let k = b.known.as_ref().unwrap();
        let r2 = &k.r * &k.r;
        let lhs = commutator(&r2, &b.m).unwrap();
        prop_assert!(lhs.distance(&r2.scale(k.gamma * 2.0)) <= 1e-10 * r2.frobenius_norm().max(1.0));
    }

    #[test]
    fn linearity_in_r(seed in any::<u64>(), s in prop::sample::select(vec![0.5, 2.0])) {
        let t = Tolerance::default();
        let b = random_triple(&[2, 2, 2], C64::new(1.0, 0.0), seed).unwrap();
        let k = b.known.as_ref().unwrap();
        let scaled = &k.h0 + &(&(&k.r + &k.r.adjoint()) * s);
        let d0 = detect(&b.h, &b.m, t).unwrap();
        let d1 = detect(&scaled, &b.m, t).unwrap();
        prop_assert!((d0.gamma().unwrap() - d1.gamma().unwrap()).norm() <= 1e-8);
    }

    #[test]
    fn swap_covariance(dim in 2usize..8, seed in any::<u64>(), g1 in 0.2f64..3.0, g2 in -2.0f64..2.0) {
        let h = herm(dim, seed);
        let m = herm(dim, seed.wrapping_add(1));
        let g = C64::new(g1, g2);
        let a = reconstruct_case2(&h, &m, g).unwrap();
        let b = reconstruct_case2(&h, &m, -g.conj()).unwrap();
        prop_assert!(b.r.distance(&a.r.adjoint()) <= 1e-12 * a.r.frobenius_norm().max(1.0));
    }

    #[test]
    fn hermitian_pairs_never_certify_complex_gamma(dim in 2usize..6, seed in any::<u64>()) {
        let t = Tolerance::default();
        let h = herm(dim, seed);
        let m = herm(dim, seed.wrapping_mul(3));
        let d = detect(&h, &m, t).unwrap();
        if let SymmetryKind::Case1 { gamma2 } = d.kind {
            if gamma2 != 0.0 && d.residual <= t.rtol {
                let c1 = commutator(&h, &m).unwrap().frobenius_norm();
                prop_assert!(c1 <= 1e-6 * (h.frobenius_norm() * m.frobenius_norm()).max(1.0));
            }
        }
    }
}

#[test]
fn complex_gamma_round_trip_through_fit() {
    let t = Tolerance::default();
    let g = C64::new(1.5, 0.7);
    for seed in 0..25 {
        let b = random_triple(&[2, 3, 2], g, seed).unwrap();
        let cs = b.commutators.as_ref().unwrap();
        let fit = gensym_core::gensym::fit_case2(&cs[0], &cs[1], &cs[2], t).unwrap();
        assert!(fit.admissible);
        assert!((C64::new(fit.gamma1, fit.gamma2) - g).norm() <= 1e-8, "{fit:?}");
    }
}
