//! Commutator-relation tests deciding whether `M` is a generalised symmetry
//! of `H`, and the least-squares fits that recover `γ`.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operator::{commutator_ladder, frobenius_inner_unchecked, Operator, C64, I};
use crate::tolerance::Tolerance;

/// Gram matrices with condition number above this are flagged.
pub const CONDITIONING_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetryKind {
    /// `[H, M] = 0`
    Genuine,
    /// `[H,M]₂ = iγ₂[H,M]` with `γ₂ ≠ 0`.
    Case1 { gamma2: f64 },
    /// `[H,M]₃ = 2iγ₂[H,M]₂ + (γ₁² + γ₂²)[H,M]` with `γ₁ > 0`.
    Case2 { gamma1: f64, gamma2: f64 },
    NoGenSym,
}

impl SymmetryKind {
    pub fn name(&self) -> &'static str {
        match self {
            SymmetryKind::Genuine => "Genuine",
            SymmetryKind::Case1 { .. } => "Case1",
            SymmetryKind::Case2 { .. } => "Case2",
            SymmetryKind::NoGenSym => "NoGenSym",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionResult {
    pub kind: SymmetryKind,
    /// Relative Frobenius residual of the accepted relation (or of the best
    /// rejected fit for `NoGenSym`).
    pub residual: f64,
    pub conditioning_flag: bool,
    /// Set for `Case1` acceptances: on finite Hermitian matrices that case
    /// forces `[H, M] = 0`.
    pub degenerate: bool,
}

impl DetectionResult {
    pub fn is_generalised_symmetry(&self) -> bool {
        !matches!(self.kind, SymmetryKind::NoGenSym)
    }

    pub fn gamma(&self) -> Option<C64> {
        match self.kind {
            SymmetryKind::Case1 { gamma2 } => Some(C64::new(0.0, gamma2)),
            SymmetryKind::Case2 { gamma1, gamma2 } => Some(C64::new(gamma1, gamma2)),
            _ => None,
        }
    }

    /// `γ₁` when the detected `γ` is real within `max(atol, rtol·|γ|)`.
    pub fn real_gamma(&self, tol: Tolerance) -> Option<f64> {
        match self.kind {
            SymmetryKind::Case2 { gamma1, gamma2 } if gamma2.abs() <= tol.bound(gamma1.abs()) => {
                Some(gamma1)
            }
            _ => None,
        }
    }
}

impl Serialize for DetectionResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (g1, g2) = match self.kind {
            SymmetryKind::Case1 { gamma2 } => (None, Some(gamma2)),
            SymmetryKind::Case2 { gamma1, gamma2 } => (Some(gamma1), Some(gamma2)),
            _ => (None, None),
        };
        let mut st = s.serialize_struct("DetectionResult", 6)?;
        st.serialize_field("kind", self.kind.name())?;
        st.serialize_field("gamma1", &g1)?;
        st.serialize_field("gamma2", &g2)?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("conditioning_flag", &self.conditioning_flag)?;
        st.serialize_field("degenerate", &self.degenerate)?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case2Fit {
    /// Canonical (positive) root; zero when `γ₁²` fell below the floor.
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma1_sq: f64,
    pub residual: f64,
    pub conditioning: bool,
    /// `γ₁²` cleared the floor `max(atol, 1e−10·(γ₂² + 1))`.
    pub admissible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case1Fit {
    pub gamma2: f64,
    pub residual: f64,
}

fn re_inner(a: &Operator, b: &Operator) -> f64 {
    frobenius_inner_unchecked(a, b).re
}

fn require_nonzero(c1: &Operator) -> Result<()> {
    if c1.frobenius_norm() == 0.0 {
        return Err(Error::Precondition(
            "first commutator vanishes; no ladder relation to fit".into(),
        ));
    }
    Ok(())
}

/// Solves the 2×2 symmetric positive semi-definite system `G x = b`,
/// discarding eigen-directions of `G` below `CONDITIONING_LIMIT⁻¹·λ_max`.
/// Returns the solution and whether that truncation (or the flag) applied.
fn solve_gram(g: [[f64; 2]; 2], b: [f64; 2]) -> ([f64; 2], bool) {
    let (a, bb, d) = (g[0][0], g[0][1], g[1][1]);
    let tr = a + d;
    let det = a * d - bb * bb;
    let disc = ((a - d) * (a - d) + 4.0 * bb * bb).sqrt();
    let lmax = 0.5 * (tr + disc);
    let lmin = if lmax > 0.0 { det / lmax } else { 0.0 };
    let flagged = lmin <= 0.0 || lmax / lmin > CONDITIONING_LIMIT;
    if !flagged {
        return ([(d * b[0] - bb * b[1]) / det, (a * b[1] - bb * b[0]) / det], false);
    }
    if lmax <= 0.0 {
        return ([0.0, 0.0], true);
    }
    // eigenvector of lmax
    let v = if bb != 0.0 {
        let (x, y) = (lmax - d, bb);
        let n = (x * x + y * y).sqrt();
        [x / n, y / n]
    } else if a >= d {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let coef = (v[0] * b[0] + v[1] * b[1]) / lmax;
    ([coef * v[0], coef * v[1]], true)
}

/// Real least-squares fit of `C₃ ≈ iα·C₂ + β·C₁`, giving `γ₂ = α/2` and
/// `γ₁² = β − γ₂²`.
pub fn fit_case2(c1: &Operator, c2: &Operator, c3: &Operator, tol: Tolerance) -> Result<Case2Fit> {
    c1.check_same_dim(c2)?;
    c1.check_same_dim(c3)?;
    require_nonzero(c1)?;
    let ic2 = c2.scale(I);
    let g = [
        [re_inner(&ic2, &ic2), re_inner(&ic2, c1)],
        [re_inner(c1, &ic2), re_inner(c1, c1)],
    ];
    let b = [re_inner(&ic2, c3), re_inner(c1, c3)];
    let ([alpha, beta], conditioning) = solve_gram(g, b);

    let fitted = ic2.matrix() * C64::new(alpha, 0.0) + c1.matrix() * C64::new(beta, 0.0);
    let resid = (c3.matrix() - fitted).norm();
    let denom = c3.frobenius_norm().max(c1.frobenius_norm()).max(tol.atol);
    let residual = resid / denom;

    let gamma2 = 0.5 * alpha;
    let gamma1_sq = beta - gamma2 * gamma2;
    let floor = tol.atol.max(1e-10 * (gamma2 * gamma2 + 1.0));
    let admissible = gamma1_sq > floor;
    Ok(Case2Fit {
        gamma1: if admissible { gamma1_sq.sqrt() } else { 0.0 },
        gamma2,
        gamma1_sq,
        residual,
        conditioning,
        admissible,
    })
}

/// Real least-squares fit of `C₂ ≈ iγ₂·C₁`.
pub fn fit_case1(c1: &Operator, c2: &Operator, tol: Tolerance) -> Result<Case1Fit> {
    c1.check_same_dim(c2)?;
    require_nonzero(c1)?;
    let ic1 = c1.scale(I);
    let gamma2 = re_inner(&ic1, c2) / re_inner(&ic1, &ic1);
    let resid = (c2.matrix() - ic1.matrix() * C64::new(gamma2, 0.0)).norm();
    let denom = c2.frobenius_norm().max(c1.frobenius_norm()).max(tol.atol);
    Ok(Case1Fit {
        gamma2,
        residual: resid / denom,
    })
}

/// Classifies the pair `(H, M)`: genuine symmetry, either commutator case,
/// or no generalised symmetry. Fits are tried in the order Case2, Case1.
pub fn detect(h: &Operator, m: &Operator, tol: Tolerance) -> Result<DetectionResult> {
    h.check_same_dim(m)?;
    for op in [h, m] {
        if !op.hermitian_hint() {
            return Err(Error::Validation(format!(
                "operator '{}' is not Hermitian",
                op.label()
            )));
        }
    }
    let cs = commutator_ladder(h, m, 3)?;
    let (c1, c2, c3) = (&cs[0], &cs[1], &cs[2]);

    let genuine_scale = (h.frobenius_norm() * m.frobenius_norm()).max(1.0);
    let c1_norm = c1.frobenius_norm();
    if c1_norm <= tol.rtol * genuine_scale {
        return Ok(DetectionResult {
            kind: SymmetryKind::Genuine,
            residual: c1_norm / genuine_scale,
            conditioning_flag: false,
            degenerate: false,
        });
    }

    let f2 = fit_case2(c1, c2, c3, tol)?;
    if f2.admissible && f2.residual <= tol.rtol {
        return Ok(DetectionResult {
            kind: SymmetryKind::Case2 {
                gamma1: f2.gamma1,
                gamma2: f2.gamma2,
            },
            residual: f2.residual,
            conditioning_flag: f2.conditioning,
            degenerate: false,
        });
    }

    let f1 = fit_case1(c1, c2, tol)?;
    if f1.gamma2.abs() > tol.atol && f1.residual <= tol.rtol {
        return Ok(DetectionResult {
            kind: SymmetryKind::Case1 { gamma2: f1.gamma2 },
            residual: f1.residual,
            conditioning_flag: f2.conditioning,
            degenerate: true,
        });
    }

    Ok(DetectionResult {
        kind: SymmetryKind::NoGenSym,
        residual: f2.residual.min(f1.residual),
        conditioning_flag: f2.conditioning,
        degenerate: false,
    })
}
