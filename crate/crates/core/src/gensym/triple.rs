//! Reconstruction of the decomposition `H = H₀ + R + R†` from the
//! commutators of `H` with `M`, and its verification.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{c, commutator_ladder, commutator_unchecked, Operator, C64, I};
use crate::spectral::{exp_neg, SpectralDecomposition};
use crate::tolerance::Tolerance;

/// Relative hermiticity bound for a reconstructed `H₀`.
pub const H0_HERMITIAN_BOUND: f64 = 1e-10;

/// Norms of `[R†R, M]`, `[RR†, M]`, `[R†R, H₀]`, `[RR†, H₀]`. Informational
/// only; these commutations are not part of the definition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticCommutators {
    pub rdr_m: f64,
    pub rrd_m: f64,
    pub rdr_h0: f64,
    pub rrd_h0: f64,
}

impl QuadraticCommutators {
    fn compute(r: &Operator, h0: &Operator, m: &Operator) -> Self {
        let rd = r.adjoint();
        let rdr = &rd * r;
        let rrd = r * &rd;
        Self {
            rdr_m: commutator_unchecked(&rdr, m).frobenius_norm(),
            rrd_m: commutator_unchecked(&rrd, m).frobenius_norm(),
            rdr_h0: commutator_unchecked(&rdr, h0).frobenius_norm(),
            rrd_h0: commutator_unchecked(&rrd, h0).frobenius_norm(),
        }
    }

    pub fn commute_with_m(&self, bound: f64) -> bool {
        self.rdr_m <= bound && self.rrd_m <= bound
    }

    pub fn commute_with_h0(&self, bound: f64) -> bool {
        self.rdr_h0 <= bound && self.rrd_h0 <= bound
    }
}

/// A decomposition `(H₀, R, γ)` of `H` relative to `M`.
#[derive(Debug, Clone)]
pub struct GenSymTriple {
    pub h: Operator,
    pub h0: Operator,
    pub r: Operator,
    pub gamma: C64,
    /// `‖H − H₀ − R − R†‖_F`
    pub residual_sum: f64,
    /// `‖[H₀, M]‖_F`
    pub residual_h0m: f64,
    /// `‖[R, M] − γR‖_F`
    pub residual_ladder: f64,
    pub quadratic: QuadraticCommutators,
}

impl GenSymTriple {
    /// Builds a triple from known parts, computing all residuals.
    pub fn from_parts(h: &Operator, m: &Operator, h0: Operator, r: Operator, gamma: C64) -> Result<Self> {
        h.check_same_dim(m)?;
        h.check_same_dim(&h0)?;
        h.check_same_dim(&r)?;
        Ok(Self::assemble(h, m, h0, r, gamma))
    }

    fn assemble(h: &Operator, m: &Operator, h0: Operator, r: Operator, gamma: C64) -> Self {
        let rd = r.adjoint();
        let residual_sum = (h.matrix() - h0.matrix() - r.matrix() - rd.matrix()).norm();
        let residual_h0m = commutator_unchecked(&h0, m).frobenius_norm();
        let residual_ladder = (commutator_unchecked(&r, m).matrix() - r.matrix() * gamma).norm();
        let quadratic = QuadraticCommutators::compute(&r, &h0, m);
        Self {
            h: h.clone(),
            h0: h0.with_label("H0"),
            r: r.with_label("R"),
            gamma,
            residual_sum,
            residual_h0m,
            residual_ladder,
            quadratic,
        }
    }

    pub fn r_dagger(&self) -> Operator {
        self.r.adjoint()
    }

    /// `γ₁` when `γ` is real within `max(atol, rtol·|γ|)`.
    pub fn real_gamma(&self, tol: Tolerance) -> Option<f64> {
        (self.gamma.im.abs() <= tol.bound(self.gamma.re.abs())).then_some(self.gamma.re)
    }

    /// `R` vanishes relative to `H`: the ladder condition is vacuous.
    pub fn is_degenerate(&self, tol: Tolerance) -> bool {
        self.r.frobenius_norm() <= tol.bound(self.h.frobenius_norm().max(1.0))
    }
}

/// `R = γ̄/(2γ₁|γ|²)·([H,M]₂ + γ̄[H,M])`,
/// `H₀ = (−[H,M]₂ + 2iγ₂[H,M] + |γ|²H)/|γ|²`.
pub fn reconstruct_case2(h: &Operator, m: &Operator, gamma: C64) -> Result<GenSymTriple> {
    h.check_same_dim(m)?;
    if gamma.re == 0.0 || !gamma.re.is_finite() || !gamma.im.is_finite() {
        return Err(Error::Precondition(format!(
            "case-2 reconstruction needs Re γ ≠ 0, got {gamma}"
        )));
    }
    let cs = commutator_ladder(h, m, 2)?;
    let (c1, c2) = (cs[0].matrix(), cs[1].matrix());
    let gbar = gamma.conj();
    let g2 = gamma.norm_sqr();
    let r = (c2 + c1 * gbar) * (gbar / (2.0 * gamma.re * g2));
    let h0 = (-c2 + c1 * (I * 2.0 * gamma.im) + h.matrix() * c(g2)) * c(1.0 / g2);
    Ok(GenSymTriple::assemble(
        h,
        m,
        Operator::from_matrix(h0, "H0"),
        Operator::from_matrix(r, "R"),
        gamma,
    ))
}

/// `H₀ = (i/γ₂)[H,M] + H`, `R = R† = −(i/2γ₂)[H,M]`, `γ = iγ₂`.
pub fn reconstruct_case1(h: &Operator, m: &Operator, gamma2: f64) -> Result<GenSymTriple> {
    h.check_same_dim(m)?;
    if gamma2 == 0.0 || !gamma2.is_finite() {
        return Err(Error::Precondition("case-1 reconstruction needs γ₂ ≠ 0".into()));
    }
    let c1 = commutator_unchecked(h, m);
    let h0 = c1.matrix() * (I / gamma2) + h.matrix();
    let r = c1.matrix() * (-I / (2.0 * gamma2));
    Ok(GenSymTriple::assemble(
        h,
        m,
        Operator::from_matrix(h0, "H0"),
        Operator::from_matrix(r, "R"),
        C64::new(0.0, gamma2),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationReport {
    pub residual_sum: f64,
    pub residual_h0m: f64,
    pub residual_ladder: f64,
    /// `‖H₀ − H₀†‖_F / max(1, ‖H₀‖_F)`
    pub h0_hermiticity: f64,
    /// Acceptance bound `rtol·max(1, ‖H‖_F)` for the three residuals.
    pub bound: f64,
    pub sum_ok: bool,
    pub h0m_ok: bool,
    pub ladder_ok: bool,
    pub h0_hermitian_ok: bool,
    pub gamma_nonzero: bool,
    /// `R ≈ 0`: the ladder relation holds vacuously.
    pub degenerate: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.sum_ok && self.h0m_ok && self.ladder_ok && self.h0_hermitian_ok && self.gamma_nonzero
    }
}

/// Recomputes every defining condition of the triple against `(H, M)`.
pub fn verify_triple(h: &Operator, m: &Operator, t: &GenSymTriple, tol: Tolerance) -> Result<VerificationReport> {
    h.check_same_dim(m)?;
    h.check_same_dim(&t.h0)?;
    let fresh = GenSymTriple::assemble(h, m, t.h0.clone(), t.r.clone(), t.gamma);
    let bound = tol.rtol * h.frobenius_norm().max(1.0);
    let h0_hermiticity = t.h0.hermiticity_defect() / t.h0.frobenius_norm().max(1.0);
    Ok(VerificationReport {
        residual_sum: fresh.residual_sum,
        residual_h0m: fresh.residual_h0m,
        residual_ladder: fresh.residual_ladder,
        h0_hermiticity,
        bound,
        sum_ok: fresh.residual_sum <= bound,
        h0m_ok: fresh.residual_h0m <= bound,
        ladder_ok: fresh.residual_ladder <= bound,
        h0_hermitian_ok: h0_hermiticity <= H0_HERMITIAN_BOUND,
        gamma_nonzero: t.gamma != C64::new(0.0, 0.0),
        degenerate: fresh.is_degenerate(tol),
    })
}

/// Resolves the `R ↔ R†` ambiguity: a triple with `Re γ < 0` becomes
/// `(H₀, R†, −γ̄)`, which satisfies the same conditions.
pub fn canonicalize(t: &GenSymTriple) -> GenSymTriple {
    if t.gamma.re >= 0.0 {
        return t.clone();
    }
    let mut out = t.clone();
    out.r = t.r.adjoint().with_label("R");
    out.gamma = -t.gamma.conj();
    out.quadratic = QuadraticCommutators {
        rdr_m: t.quadratic.rrd_m,
        rrd_m: t.quadratic.rdr_m,
        rdr_h0: t.quadratic.rrd_h0,
        rrd_h0: t.quadratic.rdr_h0,
    };
    out
}

/// The non-unitary conjugation `e^{−zM} H e^{zM}` evaluated directly and
/// through the ladder form `H₀ + e^{zγ}R + e^{−zγ̄}R†`.
#[derive(Debug, Clone)]
pub struct SimilarityTransform {
    pub direct: Operator,
    pub ladder: Operator,
    /// `‖direct − ladder‖_F / max(1, ‖H‖_F)`
    pub discrepancy: f64,
}

pub fn similarity_transform(
    t: &GenSymTriple,
    m_spec: &SpectralDecomposition,
    z: C64,
    tol: Tolerance,
) -> Result<SimilarityTransform> {
    if m_spec.dim() != t.h.dim() {
        return Err(Error::DimensionMismatch {
            left: t.h.dim(),
            right: m_spec.dim(),
        });
    }
    let ladder_m = t.h0.matrix()
        + t.r.matrix() * (z * t.gamma).exp()
        + t.r.adjoint().matrix() * (-z * t.gamma.conj()).exp();
    let ladder = Operator::from_matrix(ladder_m, "H(z)");
    let direct = if z == C64::new(0.0, 0.0) {
        t.h.clone()
    } else {
        let left = exp_neg(m_spec, z);
        let right = exp_neg(m_spec, -z);
        Operator::from_matrix(left.matrix() * t.h.matrix() * right.matrix(), "e^-zM H e^zM")
    };
    let discrepancy = direct.distance(&ladder) / t.h.frobenius_norm().max(1.0);
    if discrepancy > tol.rtol {
        return Err(Error::Numerical(format!(
            "similarity routes disagree: relative discrepancy {discrepancy:.3e}"
        )));
    }
    Ok(SimilarityTransform {
        direct,
        ladder,
        discrepancy,
    })
}
