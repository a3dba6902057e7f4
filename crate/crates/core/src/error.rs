//! Crate-wide error type.

/// Errors produced by constructors, kinematic relations and the solver.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A field or argument violated its domain (named so callers can point
    /// at the offending input).
    #[error("invalid {field}: {reason} (got {value})")]
    InvalidField {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// An operation-level precondition failed.
    #[error("{op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// A bracketing refinement ran out of iterations or bracket width
    /// before meeting the residual tolerance.
    #[error(
        "{op}: no convergence after {iterations} iterations on [{lo:e}, {hi:e}] \
         (residual {residual:e})"
    )]
    NoConvergence {
        op: &'static str,
        iterations: usize,
        lo: f64,
        hi: f64,
        residual: f64,
    },

    /// The recoil fixed point never changed sign while scanning down from
    /// beta = 1; records how far the scan went.
    #[error(
        "recoil factor did not converge at radius {radius:e}: \
         no sign change down to beta = {beta_floor:e}"
    )]
    RecoilNoBracket { radius: f64, beta_floor: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
