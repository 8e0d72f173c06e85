//! Numeric tolerances shared by recursion checks and statistical tests.

use crate::error::{Error, Result};

/// Tolerances used by diagnostics and verification routines.
#[derive(Debug, Clone, Copy)]
pub struct NumericPolicy {
    /// Relative tolerance for algebraic-recursion residuals.
    pub recursion_tol: f64,
    /// Step for central finite differences in gradient checks.
    pub fd_step: f64,
    /// Confidence multiplier (in sigmas) for statistical pass/fail bounds.
    pub stat_confidence: f64,
}

impl NumericPolicy {
    pub fn new(recursion_tol: f64, fd_step: f64, stat_confidence: f64) -> Result<Self> {
        if !(recursion_tol > 0.0 && recursion_tol <= 1e-6) {
            return Err(Error::invalid(
                "recursion_tol",
                format!("must be in (0, 1e-6], got {recursion_tol}"),
            ));
        }
        if fd_step <= 0.0 {
            return Err(Error::invalid("fd_step", format!("must be positive, got {fd_step}")));
        }
        if stat_confidence <= 0.0 {
            return Err(Error::invalid(
                "stat_confidence",
                format!("must be positive, got {stat_confidence}"),
            ));
        }
        Ok(NumericPolicy {
            recursion_tol,
            fd_step,
            stat_confidence,
        })
    }
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            recursion_tol: 1e-9,
            fd_step: 1e-5,
            stat_confidence: 4.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_loose_recursion_tol() {
        assert!(NumericPolicy::new(1e-5, 1e-5, 4.0).is_err());
        assert!(NumericPolicy::new(1e-9, 1e-5, 4.0).is_ok());
    }

    #[test]
    fn rejects_nonpositive_fields() {
        assert!(NumericPolicy::new(1e-9, 0.0, 4.0).is_err());
        assert!(NumericPolicy::new(1e-9, 1e-5, -1.0).is_err());
    }
}
