//! Stability of eigenvectors under a ladder decomposition with real `γ`.
//!
//! An eigenvector `ψ` is stable when `ψ`, `Rψ` and `R†ψ` are linearly
//! dependent, `x·Rψ + y·R†ψ = u·ψ`. The coefficient pattern then falls into
//! one of five cases; in the last one `e^{−zM}ψ` is a second eigenvector.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gensym::GenSymTriple;
use crate::operator::{c, serialize_c64, C64, I};
use crate::spectral::{exp_neg, SpectralDecomposition};
use crate::tolerance::Tolerance;

/// Coefficients below this fraction of `max(|x|, |y|, |u|)` count as zero.
pub const CASE_CUTOFF: f64 = 1e-8;

const UNIT_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficients {
    #[serde(serialize_with = "serialize_c64")]
    pub x: C64,
    #[serde(serialize_with = "serialize_c64")]
    pub y: C64,
    #[serde(serialize_with = "serialize_c64")]
    pub u: C64,
}

impl Coefficients {
    fn from_vec(v: &Vector3<C64>) -> Self {
        Self {
            x: v[0],
            y: v[1],
            u: v[2],
        }
    }

    fn scale(&self) -> f64 {
        self.x.norm().max(self.y.norm()).max(self.u.norm())
    }

    fn is_zero(&self, q: C64) -> bool {
        q.norm() <= CASE_CUTOFF * self.scale()
    }

    /// Divides by `u`, or by the larger of `x`, `y` when `u` vanishes.
    fn normalized(&self) -> Self {
        let pivot = if !self.is_zero(self.u) {
            self.u
        } else if self.x.norm() >= self.y.norm() {
            self.x
        } else {
            self.y
        };
        Self {
            x: self.x / pivot,
            y: self.y / pivot,
            u: self.u / pivot,
        }
    }

    fn matches(&self, case: u8) -> bool {
        let z = |q| self.is_zero(q);
        match case {
            1 => z(self.u),
            2 => z(self.y) && !z(self.u),
            3 => z(self.x) && !z(self.u),
            4 => z(self.x + self.y) && !z(self.u) && !z(self.x),
            5 => !z(self.u) && !z(self.x) && !z(self.y) && !z(self.x + self.y),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AnnihilationFlags {
    #[serde(rename = "R_annihilates")]
    pub r_annihilates: bool,
    #[serde(rename = "Rd_annihilates")]
    pub rd_annihilates: bool,
    pub sum_annihilates: bool,
}

/// Outcome of the rank test on `[a | b | ψ]`.
#[derive(Debug, Clone)]
pub struct Dependence {
    pub stable: bool,
    /// `σ₁ ≥ σ₂ ≥ σ₃`
    pub singular_values: [f64; 3],
    pub flags: AnnihilationFlags,
    /// Orthonormal basis of all `(x, y, u)` with `x·a + y·b = u·ψ`.
    null_basis: Vec<Vector3<C64>>,
}

impl Dependence {
    /// The null vector of the smallest singular value, normalised.
    pub fn coeffs(&self) -> Option<Coefficients> {
        self.null_basis.last().map(|v| Coefficients::from_vec(v).normalized())
    }

    pub fn null_dimension(&self) -> usize {
        self.null_basis.len()
    }

    /// A coefficient set realising `case`, if the null span contains one.
    pub fn witness(&self, case: u8) -> Option<Coefficients> {
        let constraint: Option<[C64; 3]> = match case {
            1 => Some([c(0.0), c(0.0), c(1.0)]),
            2 => Some([c(0.0), c(1.0), c(0.0)]),
            3 => Some([c(1.0), c(0.0), c(0.0)]),
            4 => Some([c(1.0), c(1.0), c(0.0)]),
            _ => None,
        };
        let span = match constraint {
            Some(ell) => constrained_span(&self.null_basis, ell),
            None => self.null_basis.clone(),
        };
        candidates(&span)
            .into_iter()
            .map(|v| Coefficients::from_vec(&v))
            .find(|k| k.scale() > 0.0 && k.matches(case))
            .map(|k| k.normalized())
    }

    /// Every case realised by some coefficient set, ascending.
    pub fn cases(&self) -> Vec<u8> {
        (1..=5).filter(|&k| self.witness(k).is_some()).collect()
    }
}

/// Vectors of `span(basis)` annihilated by the functional `ell`.
fn constrained_span(basis: &[Vector3<C64>], ell: [C64; 3]) -> Vec<Vector3<C64>> {
    let ell = Vector3::from(ell);
    let r: Vec<C64> = basis.iter().map(|b| ell.dot(b)).collect();
    let Some(p) = (0..r.len()).max_by(|&i, &j| r[i].norm().total_cmp(&r[j].norm())) else {
        return Vec::new();
    };
    if r[p].norm() <= CASE_CUTOFF * ell.norm() {
        return basis.to_vec();
    }
    (0..basis.len())
        .filter(|&j| j != p)
        .map(|j| basis[j] * r[p] - basis[p] * r[j])
        .collect()
}

/// A few fixed combinations that avoid accidental zeros of a generic member.
fn candidates(span: &[Vector3<C64>]) -> Vec<Vector3<C64>> {
    let mut out = span.to_vec();
    for i in 0..span.len() {
        for j in i + 1..span.len() {
            out.push(span[i] + span[j]);
            out.push(span[i] - span[j]);
            out.push(span[i] + span[j] * I);
            out.push(span[i] + span[j] * c(2.0));
        }
    }
    if span.len() == 3 {
        out.push(span[0] + span[1] * c(2.0) + span[2] * C64::new(0.5, 1.5));
    }
    out
}

/// Rank test on `[a | b | ψ]`: stable iff `σ₃ ≤ rtol·σ₁`.
pub fn linear_dependence(psi: &DVector<C64>, a: &DVector<C64>, b: &DVector<C64>, tol: Tolerance) -> Result<Dependence> {
    let n = psi.len();
    if a.len() != n || b.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: if a.len() != n { a.len() } else { b.len() },
        });
    }
    if psi.norm() == 0.0 {
        return Err(Error::Precondition("ψ must be nonzero".into()));
    }
    let rows = n.max(3);
    let mut m = DMatrix::<C64>::zeros(rows, 3);
    m.view_mut((0, 0), (n, 1)).copy_from(a);
    m.view_mut((0, 1), (n, 1)).copy_from(b);
    m.view_mut((0, 2), (n, 1)).copy_from(psi);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let s = &svd.singular_values;
    let sigma = [s[0], s[1], s[2]];
    let cutoff = tol.rtol * sigma[0];
    let null_basis = (0..3)
        .filter(|&k| sigma[k] <= cutoff)
        .map(|k| {
            // right singular vector k; the relation reads x·a + y·b − u·ψ = 0
            let v = v_t.row(k).transpose().map(|z| z.conj());
            Vector3::new(v[0], v[1], -v[2])
        })
        .collect();
    let flags = AnnihilationFlags {
        r_annihilates: a.norm() <= cutoff,
        rd_annihilates: b.norm() <= cutoff,
        sum_annihilates: (a + b).norm() <= cutoff,
    };
    Ok(Dependence {
        stable: sigma[2] <= cutoff,
        singular_values: sigma,
        flags,
        null_basis,
    })
}

/// A second eigenvector `χ = e^{−zM}ψ` with `e^{zγ} = −y/x`.
#[derive(Debug, Clone, Serialize)]
pub struct Partner {
    #[serde(serialize_with = "serialize_c64")]
    pub z: C64,
    #[serde(skip)]
    pub chi: DVector<C64>,
    #[serde(rename = "E_second")]
    pub e_second: f64,
    /// Imaginary part of `E + ε`; zero up to rounding for Hermitian `H`.
    #[serde(rename = "E_second_im")]
    pub e_second_im: f64,
    /// `‖Hχ − E″χ‖ / ‖χ‖`
    pub residual: f64,
    pub verified: bool,
}

/// `z = Log(−y/x)/γ`, `χ = e^{−zM}ψ`, `E″ = E + (e^{−zγ} − 1)/x` with the
/// coefficients normalised to `u = 1`.
pub fn partner_eigenvector(
    psi: &DVector<C64>,
    energy: f64,
    coeffs: Coefficients,
    t: &GenSymTriple,
    m_spec: &SpectralDecomposition,
    tol: Tolerance,
) -> Result<Partner> {
    let gamma = t
        .real_gamma(tol)
        .ok_or_else(|| Error::Precondition(format!("stability needs real γ, got {}", t.gamma)))?;
    if gamma == 0.0 {
        return Err(Error::Precondition("γ must be nonzero".into()));
    }
    if coeffs.u.norm() == 0.0 {
        return Err(Error::Precondition("partner needs u ≠ 0".into()));
    }
    let Coefficients { x, y, .. } = Coefficients {
        x: coeffs.x / coeffs.u,
        y: coeffs.y / coeffs.u,
        u: c(1.0),
    };
    let scale = x.norm().max(y.norm()).max(1.0);
    if x.norm() <= CASE_CUTOFF * scale || y.norm() <= CASE_CUTOFF * scale {
        return Err(Error::Precondition("partner needs x ≠ 0 and y ≠ 0".into()));
    }
    if (x + y).norm() <= CASE_CUTOFF * scale {
        return Err(Error::Precondition("x + y = 0 is case 4, which has no partner".into()));
    }
    let w = -y / x;
    let z = w.ln() / gamma;
    let chi_raw = exp_neg(m_spec, z).apply(psi);
    let epsilon = ((-z * gamma).exp() - 1.0) / x;
    let e2 = c(energy) + epsilon;
    let chi_norm = chi_raw.norm();
    let residual = (t.h.apply(&chi_raw) - &chi_raw * e2).norm() / chi_norm;
    Ok(Partner {
        z,
        chi: chi_raw.unscale(chi_norm),
        e_second: e2.re,
        e_second_im: e2.im,
        residual,
        verified: residual <= tol.bound(t.h.frobenius_norm().max(1.0)),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityRecord {
    pub index: usize,
    pub eigenvalue: f64,
    pub stable: bool,
    pub cases: Vec<u8>,
    pub primary_case: Option<u8>,
    pub coeffs: Option<Coefficients>,
    pub flags: AnnihilationFlags,
    pub partner: Option<Partner>,
    /// `‖[H, M]ψ‖`, recorded when case 4 fires.
    pub case4_commutator: Option<f64>,
    /// `‖H₀ψ − Eψ‖`, recorded when `(R + R†)ψ = 0`.
    pub h0_residual: Option<f64>,
}

/// Classifies one eigenvector `ψ` of `H` with eigenvalue `E`.
pub fn classify(
    index: usize,
    psi: &DVector<C64>,
    energy: f64,
    t: &GenSymTriple,
    m_spec: &SpectralDecomposition,
    tol: Tolerance,
) -> Result<StabilityRecord> {
    if t.real_gamma(tol).is_none() {
        return Err(Error::Precondition(format!("stability needs real γ, got {}", t.gamma)));
    }
    if psi.len() != t.h.dim() || m_spec.dim() != t.h.dim() {
        return Err(Error::DimensionMismatch {
            left: t.h.dim(),
            right: psi.len(),
        });
    }
    if (psi.norm() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::Precondition(format!("ψ must be normalised, got norm {}", psi.norm())));
    }
    let h_scale = t.h.frobenius_norm().max(1.0);
    let eig_res = (t.h.apply(psi) - psi * c(energy)).norm();
    if eig_res > tol.bound(h_scale) {
        return Err(Error::Precondition(format!("ψ is not an eigenvector of H: residual {eig_res:.3e}")));
    }
    let a = t.r.apply(psi);
    let b = t.r_dagger().apply(psi);
    let dep = linear_dependence(psi, &a, &b, tol)?;
    let cases = dep.cases();
    let primary_case = cases.first().copied();
    let coeffs = primary_case.and_then(|k| dep.witness(k)).or_else(|| dep.coeffs());
    let partner = match (primary_case, coeffs) {
        (Some(5), Some(k)) => Some(partner_eigenvector(psi, energy, k, t, m_spec, tol)?),
        _ => None,
    };
    let case4_commutator = cases.contains(&4).then(|| {
        let m = crate::spectral::matrix_function(m_spec, c);
        (t.h.apply(&m.apply(psi)) - m.apply(&t.h.apply(psi))).norm()
    });
    let h0_residual = dep
        .flags
        .sum_annihilates
        .then(|| (t.h0.apply(psi) - psi * c(energy)).norm());
    Ok(StabilityRecord {
        index,
        eigenvalue: energy,
        stable: dep.stable,
        cases,
        primary_case,
        coeffs,
        flags: dep.flags,
        partner,
        case4_commutator,
        h0_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityScan {
    pub records: Vec<StabilityRecord>,
    /// Eigenvectors per primary case (`case1` … `case5`) plus `unstable`.
    pub counts: BTreeMap<String, usize>,
}

impl StabilityScan {
    pub fn count(&self, key: &str) -> usize {
        self.counts.get(key).copied().unwrap_or(0)
    }
}

/// Classifies every eigenvector of `H`, ordered by index.
pub fn scan_spectrum_stability(
    h_spec: &SpectralDecomposition,
    t: &GenSymTriple,
    m_spec: &SpectralDecomposition,
    tol: Tolerance,
) -> Result<StabilityScan> {
    if t.real_gamma(tol).is_none() {
        return Err(Error::Precondition(format!("stability needs real γ, got {}", t.gamma)));
    }
    let records = (0..h_spec.dim())
        .into_par_iter()
        .map(|i| classify(i, &h_spec.eigenvector(i), h_spec.eigenvalues()[i], t, m_spec, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut counts: BTreeMap<String, usize> = (1..=5).map(|k| (format!("case{k}"), 0)).collect();
    counts.insert("unstable".into(), 0);
    for r in &records {
        let key = match r.primary_case {
            Some(k) => format!("case{k}"),
            None => "unstable".into(),
        };
        *counts.entry(key).or_default() += 1;
    }
    Ok(StabilityScan { records, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gensym::reconstruct_case2;
    use crate::operator::Operator;
    use crate::spectral::hermitian_eigh;

    fn v(entries: &[f64]) -> DVector<C64> {
        DVector::from_iterator(entries.len(), entries.iter().map(|&x| c(x)))
    }

    #[test]
    fn zero_ladder_is_stable_with_both_flags() {
        let psi = v(&[1.0, 0.0]);
        let z = v(&[0.0, 0.0]);
        let d = linear_dependence(&psi, &z, &z, Tolerance::default()).unwrap();
        assert!(d.stable);
        assert!(d.flags.r_annihilates && d.flags.rd_annihilates && d.flags.sum_annihilates);
        assert_eq!(d.cases(), vec![1]);
    }

    #[test]
    fn generic_vectors_are_unstable() {
        let psi = v(&[0.5, 0.5, 0.5, 0.5]);
        let a = v(&[1.0, -2.0, 0.3, 0.0]);
        let b = v(&[0.1, 0.2, 0.3, -4.0]);
        let d = linear_dependence(&psi, &a, &b, Tolerance::default()).unwrap();
        assert!(!d.stable);
        assert!(d.cases().is_empty());
        assert!(d.coeffs().is_none());
    }

    #[test]
    fn singlet_pattern() {
        let s = 0.5f64.sqrt();
        let psi = v(&[s, 0.0, -s]);
        let g = 0.1;
        let a = v(&[0.0, -g, 0.0]);
        let b = v(&[0.0, g, 0.0]);
        let d = linear_dependence(&psi, &a, &b, Tolerance::default()).unwrap();
        assert!(d.stable);
        assert!(d.flags.sum_annihilates);
        let k = d.witness(1).unwrap();
        assert!((k.x - k.y).norm() < 1e-12 && k.u.norm() < 1e-12);
        assert_eq!(d.cases(), vec![1]);
    }

    #[test]
    fn zero_psi_rejected() {
        let z = v(&[0.0, 0.0]);
        assert!(linear_dependence(&z, &z, &z, Tolerance::default()).is_err());
    }

    #[test]
    fn projection_partner() {
        // H = σx with M = |1⟩⟨1|: R = |1⟩⟨0|, γ = 1
        let t = Tolerance::default();
        let h = crate::operator::pauli::sigma_x();
        let m = Operator::diagonal(&[0.0, 1.0], "P");
        let triple = reconstruct_case2(&h, &m, c(1.0)).unwrap();
        let hs = hermitian_eigh(&h, t).unwrap();
        let ms = hermitian_eigh(&m, t).unwrap();
        let scan = scan_spectrum_stability(&hs, &triple, &ms, t).unwrap();
        assert_eq!(scan.count("case5"), 2);
        for r in &scan.records {
            let p = r.partner.as_ref().unwrap();
            assert!(p.verified);
            assert!((p.e_second + r.eigenvalue).abs() < 1e-12);
        }
    }

    #[test]
    fn partner_rejects_case4_input() {
        let t = Tolerance::default();
        let h = crate::operator::pauli::sigma_x();
        let m = Operator::diagonal(&[0.0, 1.0], "P");
        let triple = reconstruct_case2(&h, &m, c(1.0)).unwrap();
        let ms = hermitian_eigh(&m, t).unwrap();
        let psi = v(&[1.0, 0.0]);
        let k = Coefficients {
            x: c(1.0),
            y: c(-1.0),
            u: c(1.0),
        };
        assert!(matches!(
            partner_eigenvector(&psi, 0.0, k, &triple, &ms, t),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn complex_gamma_rejected() {
        let t = Tolerance::default();
        let h = crate::operator::pauli::sigma_x();
        let m = Operator::diagonal(&[0.0, 1.0], "P");
        let mut triple = reconstruct_case2(&h, &m, c(1.0)).unwrap();
        triple.gamma = C64::new(1.0, 0.5);
        let ms = hermitian_eigh(&m, t).unwrap();
        let hs = hermitian_eigh(&h, t).unwrap();
        assert!(matches!(
            classify(0, &hs.eigenvector(0), hs.eigenvalues()[0], &triple, &ms, t),
            Err(Error::Precondition(_))
        ));
    }
}
