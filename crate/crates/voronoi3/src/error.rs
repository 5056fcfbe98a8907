//! Error type shared by all modules.

/// Failure modes surfaced to callers instead of silently returning garbage.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Evaluation point is within the guard tolerance of a pole of a gamma factor.
    #[error("evaluation within {tol:e} of a pole at {at}")]
    NearPole { at: String, tol: f64 },

    /// A contour parameter violates the validity strip of an integral representation.
    #[error("contour placement invalid: {0}")]
    Contour(String),

    /// The test function does not satisfy the decay/vanishing hypothesis of a
    /// summation identity.
    #[error("test function not admissible: {0}")]
    Inadmissible(String),

    /// An iterative refinement failed to reach the requested agreement.
    #[error("failed to converge: {0}")]
    NoConverge(String),

    /// Malformed or out-of-domain input.
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
