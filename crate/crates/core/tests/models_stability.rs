use gensym_core::gensym::{detect_and_reconstruct, verify_triple, GenSymTriple, SymmetryKind};
use gensym_core::models::{
    angular_block, annihilator, fermion_chain, hardcore_chain, involution_example, jaynes_cummings,
    number_operator, projection_example, random_triple, ModelBundle,
};
use gensym_core::multiplets::{canonical_eigenbasis, partition, same_multiplet, support_signature, DEFAULT_SUPPORT_EPS};
use gensym_core::operator::{anticommutator, commutator, proportionality};
use gensym_core::spectral::{exp_neg, hermitian_eigh, SpectralDecomposition};
use gensym_core::stability::{classify, linear_dependence, scan_spectrum_stability, StabilityScan};
use gensym_core::{Operator, Tolerance, C64};

fn t() -> Tolerance {
    Tolerance::default()
}

fn bundles() -> Vec<ModelBundle> {
    let mut out = Vec::new();
    for l in 0..=4 {
        out.push(angular_block(l, -0.5, 0.1, 1.0).unwrap());
    }
    out.push(angular_block(3, 0.2, 0.35, 1.7).unwrap());
    out.push(jaynes_cummings(1.3, 1.0, 0.2, 8, 1.0).unwrap());
    out.push(jaynes_cummings(1.0, 1.0, 0.05, 4, 0.5).unwrap());
    out.push(fermion_chain(4, 1.0, &[C64::new(0.3, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.1)]).unwrap());
    out.push(hardcore_chain(5, C64::new(0.1, 0.05)).unwrap());
    out.push(projection_example(7, 3).unwrap());
    out.push(involution_example(6, 4).unwrap());
    out.push(random_triple(&[2, 3, 1], C64::new(1.5, 0.0), 7).unwrap());
    out
}

fn specs(b: &ModelBundle) -> (SpectralDecomposition, SpectralDecomposition) {
    (
        canonical_eigenbasis(&b.h, &b.m, t()).unwrap(),
        hermitian_eigh(&b.m, t()).unwrap(),
    )
}

#[test]
fn known_triples_verify() {
    for b in bundles() {
        let triple = b.known_triple().unwrap().unwrap();
        let rep = verify_triple(&b.h, &b.m, &triple, t().with_rtol(1e-10)).unwrap();
        assert!(rep.passed(), "{}: {rep:?}", b.name);
        assert!(b.h.hermitian_hint() && b.m.hermitian_hint(), "{}", b.name);
    }
}

#[test]
fn fermion_anticommutation_up_to_eight_sites() {
    for l in 1..=8 {
        let dim = 1 << l;
        let id = Operator::identity(dim);
        let b: Vec<Operator> = (0..l).map(|j| annihilator(l, j)).collect();
        for i in 0..l {
            for j in 0..l {
                assert_eq!(anticommutator(&b[i], &b[j]).unwrap().frobenius_norm(), 0.0);
                let ac = anticommutator(&b[i], &b[j].adjoint()).unwrap();
                let want = if i == j { id.clone() } else { Operator::zeros(dim) };
                assert_eq!(ac.distance(&want), 0.0, "L={l} i={i} j={j}");
            }
        }
        let n = number_operator(l);
        for bj in &b {
            assert_eq!(commutator(bj, &n).unwrap().distance(bj), 0.0);
        }
    }
}

#[test]
fn hardcore_h0_positive_semidefinite() {
    for l in 2..=8 {
        let b = hardcore_chain(l, C64::new(0.2, -0.3)).unwrap();
        let h0 = &b.known.as_ref().unwrap().h0;
        let s = hermitian_eigh(h0, t()).unwrap();
        assert!(s.eigenvalues()[0] >= -1e-10, "L={l}: {}", s.eigenvalues()[0]);
    }
}

#[test]
fn angular_r_commutes_with_h0() {
    for l in 0..=5 {
        let b = angular_block(l, -0.3, 0.2, 1.0).unwrap();
        let k = b.known.as_ref().unwrap();
        assert_eq!(commutator(&k.r, &k.h0).unwrap().frobenius_norm(), 0.0);
    }
}

#[test]
fn supercharge_lemma_on_jc_matrices() {
    let b = jaynes_cummings(1.3, 1.0, 0.2, 10, 1.0).unwrap();
    let q = &b.known.as_ref().unwrap().r;
    let (_, resid) = proportionality(&commutator(q, &b.m).unwrap(), q).unwrap();
    assert!(resid <= 1e-12);
}

#[test]
fn l2_detects_real_gamma_of_modulus_hbar() {
    let b = angular_block(2, 0.0, 0.25, 1.0).unwrap();
    let (d, _) = detect_and_reconstruct(&b.h, &b.m, t()).unwrap();
    assert!(matches!(d.kind, SymmetryKind::Case2 { .. }));
    let g = d.real_gamma(t()).unwrap();
    assert!((g.abs() - 1.0).abs() < 1e-9);
}

#[test]
fn fermion_boundary_source_detection() {
    let z = C64::new(0.0, 0.0);
    let b = fermion_chain(4, 1.0, &[C64::new(0.3, 0.0), z, z, z]).unwrap();
    let (d, _) = detect_and_reconstruct(&b.h, &b.m, t()).unwrap();
    assert!((d.gamma().unwrap() - C64::new(1.0, 0.0)).norm() <= 1e-9, "{d:?}");
}

fn scan(b: &ModelBundle) -> (StabilityScan, GenSymTriple, SpectralDecomposition, SpectralDecomposition) {
    let (hs, ms) = specs(b);
    let triple = b.known_triple().unwrap().unwrap();
    let s = scan_spectrum_stability(&hs, &triple, &ms, t()).unwrap();
    (s, triple, hs, ms)
}

#[test]
fn stability_remarks_hold_on_all_models() {
    for b in bundles() {
        let (s, triple, _, ms) = scan(&b);
        assert_eq!(s.records.len(), b.dim());
        for r in &s.records {
            if r.cases.contains(&4) {
                let c = r.case4_commutator.unwrap();
                assert!(c <= t().bound(b.h.frobenius_norm().max(1.0)), "{}: case 4 with ‖[H,M]ψ‖ = {c}", b.name);
            }
            if r.flags.sum_annihilates {
                let res = r.h0_residual.unwrap();
                assert!(res <= t().bound(b.h.frobenius_norm().max(1.0)), "{}: ‖H0ψ − Eψ‖ = {res}", b.name);
            }
            if r.primary_case == Some(5) {
                let p = r.partner.as_ref().unwrap();
                assert!(p.verified, "{} #{}: partner residual {}", b.name, r.index, p.residual);
                // the partner is itself case 5 and points back at E
                let back = classify(0, &p.chi, p.e_second, &triple, &ms, t()).unwrap();
                assert_eq!(back.primary_case, Some(5), "{} #{}", b.name, r.index);
                let pb = back.partner.unwrap();
                assert!((pb.e_second - r.eigenvalue).abs() <= 1e-7, "{} #{}", b.name, r.index);
            }
            assert_eq!(r.stable, r.primary_case.is_some());
        }
    }
}

#[test]
fn l0_block_is_trivially_stable() {
    let b = angular_block(0, -0.5, 0.1, 1.0).unwrap();
    let (s, ..) = scan(&b);
    let r = &s.records[0];
    assert!(r.stable && r.flags.r_annihilates && r.flags.rd_annihilates);
    assert_eq!(r.primary_case, Some(1));
}

#[test]
fn perturbed_triples_are_mostly_unstable() {
    use rand::SeedableRng;
    let mut unstable = 0;
    let mut total = 0;
    for seed in 0..10 {
        let b = random_triple(&[3, 3, 3], C64::new(1.0, 0.0), seed).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed + 100);
        let noise = Operator::new(gensym_core::models::random_hermitian(9, &mut rng) * C64::new(1e-3, 0.0), "N").unwrap();
        let h = &b.h + &noise;
        // the perturbed pair is no longer exact; classify against the exact ladder
        let exact = b.known_triple().unwrap().unwrap();
        let hs = hermitian_eigh(&h, t()).unwrap();
        for i in 0..9 {
            let psi = hs.eigenvector(i);
            let a = exact.r.apply(&psi);
            let bb = exact.r_dagger().apply(&psi);
            let dep = linear_dependence(&psi, &a, &bb, t()).unwrap();
            total += 1;
            if !dep.stable {
                unstable += 1;
            }
        }
    }
    assert!(unstable * 10 >= total * 8, "{unstable}/{total} unstable");
}

/// Converse direction: when `ψ` and `e^{−zM}ψ` are both eigenvectors with
/// distinct eigenvalues, `ψ` is stable.
#[test]
fn converse_on_angular_blocks() {
    let z = C64::new(0.0, std::f64::consts::PI);
    for l in 1..=4 {
        let b = angular_block(l, -0.25, 0.15, 1.0).unwrap();
        let (hs, ms) = specs(&b);
        let k = b.known.as_ref().unwrap();
        let flip = exp_neg(&ms, z);
        let mut pairs = 0;
        for i in 0..b.dim() {
            let psi = hs.eigenvector(i);
            let chi = flip.apply(&psi);
            let chi = chi.unscale(chi.norm());
            let rq = b.h.apply(&chi).dotc(&chi);
            let hchi = b.h.apply(&chi);
            let is_eigen = (&hchi - &chi * rq).norm() <= 1e-10;
            let e = hs.eigenvalues()[i];
            if is_eigen && (rq.re - e).abs() > 10.0 * t().rtol {
                pairs += 1;
                let dep = linear_dependence(&psi, &k.r.apply(&psi), &k.r.adjoint().apply(&psi), t()).unwrap();
                assert!(dep.stable, "l={l} #{i}");
            }
        }
        assert_eq!(pairs, 2 * l as usize, "l={l}");
    }
}

#[test]
fn multiplet_transitivity_on_blocks() {
    let loose = t().with_rtol(10.0 * t().rtol);
    for l in 0..=4 {
        let b = angular_block(l, -0.5, 0.1, 1.0).unwrap();
        let (hs, ms) = specs(&b);
        let n = b.dim();
        let v: Vec<_> = (0..n).map(|i| hs.eigenvector(i)).collect();
        let same = |i: usize, j: usize, tol| same_multiplet(&v[i], &v[j], &ms, DEFAULT_SUPPORT_EPS, tol).unwrap();
        for i in 0..n {
            assert!(same(i, i, t()));
            for j in 0..n {
                assert_eq!(same(i, j, t()), same(j, i, t()));
                for k in 0..n {
                    if same(i, j, t()) && same(j, k, t()) {
                        assert!(same(i, k, loose), "l={l}: {i}~{j}~{k}");
                    }
                }
            }
        }
        let p = partition(&hs, &ms, t()).unwrap();
        let mut sigs: Vec<Vec<usize>> = v
            .iter()
            .map(|x| support_signature(x, &ms, DEFAULT_SUPPORT_EPS).unwrap().present)
            .collect();
        sigs.sort();
        sigs.dedup();
        let bound = 2f64.powi(ms.clusters().len() as i32);
        assert!((p.classes.len() as f64) <= bound && (sigs.len() as f64) <= bound);
    }
}

#[test]
fn multiplets_survive_similarity() {
    for b in [angular_block(2, -0.5, 0.1, 1.0).unwrap(), angular_block(3, 0.1, 0.2, 1.0).unwrap(), jaynes_cummings(1.3, 1.0, 0.2, 5, 1.0).unwrap()] {
        let (hs, ms) = specs(&b);
        let n = b.dim();
        for z in [0.2, -0.5] {
            let e = exp_neg(&ms, C64::new(z, 0.0));
            let hz = Operator::new(e.matrix() * b.h.matrix() * exp_neg(&ms, C64::new(-z, 0.0)).matrix(), "Hz").unwrap();
            let psi: Vec<_> = (0..n).map(|i| hs.eigenvector(i)).collect();
            let chi: Vec<_> = psi
                .iter()
                .zip(hs.eigenvalues())
                .map(|(p, &ev)| {
                    let c = e.apply(p);
                    let c = c.unscale(c.norm());
                    // still an eigenvector of the transformed operator, same eigenvalue
                    assert!((hz.apply(&c) - &c * C64::new(ev, 0.0)).norm() <= 1e-9);
                    c
                })
                .collect();
            for i in 0..n {
                for j in 0..n {
                    let before = same_multiplet(&psi[i], &psi[j], &ms, DEFAULT_SUPPORT_EPS, t()).unwrap();
                    let after = same_multiplet(&chi[i], &chi[j], &ms, DEFAULT_SUPPORT_EPS, t()).unwrap();
                    assert_eq!(before, after, "{} z={z}: {i},{j}", b.name);
                }
            }
        }
    }
}
