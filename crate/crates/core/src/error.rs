use thiserror::Error;

/// Errors raised by the computations in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A truncated series did not reach the requested tolerance before the
    /// configured ceiling.
    #[error("no convergence after cap {cap}: last relative increment {increment:e}")]
    NonConvergence { cap: f64, increment: f64 },

    /// Face boundary words do not describe a closed oriented surface.
    #[error("invalid surface (line {line}): {message}")]
    InvalidSurface { line: usize, message: String },

    /// A path is not traced in the map, or an edge has no assigned element.
    #[error("invalid path: {0}")]
    InvalidPath(String),

    /// The heat-kernel series was requested at a time below the configured floor.
    #[error("heat kernel at t = {t} is below t_min = {t_min}; series converges too slowly")]
    SlowConvergence { t: f64, t_min: f64 },

    /// Exhaustive enumeration over the symmetric group is too large.
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
