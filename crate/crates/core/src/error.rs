use thiserror::Error;

/// Errors produced by the model, analysis and quadrature routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("exact degeneracy at point {point:?}")]
    Degeneracy { point: Vec<f64> },

    #[error("representation mismatch: expected {expected}, found {found}")]
    Representation {
        expected: &'static str,
        found: &'static str,
    },

    #[error("contour passes through a degeneracy: {0}")]
    Contour(String),

    #[error("undersampled: {0}")]
    Undersampled(String),

    #[error("point {point:?} lies on the seam (q = 0)")]
    Seam { point: Vec<f64> },

    #[error("quadrature did not reach tolerance {tolerance:e} (error estimate {estimate:e})")]
    Tolerance { tolerance: f64, estimate: f64 },

    #[error("no limit: {0}")]
    NoLimit(String),

    #[error("non-adiabatic regime: {0}")]
    Regime(String),

    #[error("finite-difference step crosses a gauge discontinuity (overlap {overlap:.3})")]
    Step { overlap: f64 },

    #[error("step size underflow at t = {t:e}")]
    Stiffness { t: f64 },

    #[error("flux table entries failed: {}", failing.join(", "))]
    TableFailed { failing: Vec<String> },

    #[error("loop phase {phase:.6} is not within closure tolerance of a multiple of pi")]
    NotClosed { phase: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
