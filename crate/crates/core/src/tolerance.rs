use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative gate for the hermiticity test `‖A − A†‖_F ≤ gate·max(1, ‖A‖_F)`.
pub const HERMITIAN_GATE: f64 = 1e-12;

/// Absolute/relative tolerance pair used throughout the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            atol: 1e-9,
            rtol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(atol: f64, rtol: f64) -> Result<Self> {
        if !(atol >= 0.0 && rtol >= 0.0) || !atol.is_finite() || !rtol.is_finite() {
            return Err(Error::Validation(format!(
                "tolerances must be finite and non-negative (atol={atol}, rtol={rtol})"
            )));
        }
        Ok(Self { atol, rtol })
    }

    /// Same absolute tolerance, different relative one.
    pub fn with_rtol(self, rtol: f64) -> Self {
        Self { rtol, ..self }
    }

    /// `max(atol, rtol·scale)`
    pub fn bound(&self, scale: f64) -> f64 {
        self.atol.max(self.rtol * scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let t = Tolerance::default();
        assert_eq!(t.atol, 1e-9);
        assert_eq!(t.rtol, 1e-8);
        assert_eq!(t.bound(1.0), 1e-8);
        assert_eq!(t.bound(0.0), 1e-9);
    }

    #[test]
    fn rejects_negative() {
        assert!(Tolerance::new(-1.0, 0.0).is_err());
        assert!(Tolerance::new(0.0, f64::NAN).is_err());
        assert!(Tolerance::new(0.0, 0.0).is_ok());
    }
}
