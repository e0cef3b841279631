use alloc::string::String;

/// Errors raised by the engine model and its numerical machinery.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivision depth. Carries the best
    /// estimate reached and its error bound.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Convergence { estimate: f64, error_bound: f64 },

    /// The propagation grid lets probability leak to its edges.
    #[error("grid resolution error: {mass:e} probability within the {region} boundary band")]
    Resolution { region: &'static str, mass: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
