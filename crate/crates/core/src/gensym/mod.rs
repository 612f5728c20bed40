//! Generalised-symmetry detection and ladder decomposition.

mod detect;
mod triple;

pub use detect::{
    detect, fit_case1, fit_case2, Case1Fit, Case2Fit, DetectionResult, SymmetryKind,
    CONDITIONING_LIMIT,
};
pub use triple::{
    canonicalize, reconstruct_case1, reconstruct_case2, similarity_transform, verify_triple,
    GenSymTriple, QuadraticCommutators, SimilarityTransform, VerificationReport,
    H0_HERMITIAN_BOUND,
};

use crate::error::Result;
use crate::operator::Operator;
use crate::tolerance::Tolerance;

/// Detects and, when possible, reconstructs and canonicalises the triple.
/// Returns `None` for genuine symmetries and `NoGenSym`.
pub fn detect_and_reconstruct(
    h: &Operator,
    m: &Operator,
    tol: Tolerance,
) -> Result<(DetectionResult, Option<GenSymTriple>)> {
    let det = detect(h, m, tol)?;
    let triple = match det.kind {
        SymmetryKind::Case2 { gamma1, gamma2 } => {
            Some(canonicalize(&reconstruct_case2(h, m, num_complex::Complex64::new(gamma1, gamma2))?))
        }
        SymmetryKind::Case1 { gamma2 } => Some(reconstruct_case1(h, m, gamma2)?),
        _ => None,
    };
    Ok((det, triple))
}
