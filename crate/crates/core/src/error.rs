use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("z = {z} is on the spectrum (nearest eigenvalue {nearest})")]
    Singular { z: Complex64, nearest: Complex64 },

    #[error("matrix exponential saturated: {0}")]
    Saturation(String),

    #[error("Laplace integral diverges: Re z = {re_z} <= spectral abscissa {abscissa}")]
    Divergence { re_z: f64, abscissa: f64 },

    #[error("eigenvalue {eigenvalue} lies in the half-plane Re z >= {omega}")]
    SpectrumInHalfPlane { eigenvalue: Complex64, omega: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("iteration cap reached: {0}")]
    IterationCap(String),

    #[error("contour too close to the spectrum: {0}")]
    Conditioning(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used by front ends to pick exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: bad shapes, unreadable files, parse failures.
    Input,
    /// A mathematical hypothesis of an estimate does not hold.
    Hypothesis,
    /// The computation itself failed (overflow, non-convergence).
    Numeric,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Structural(_) | Error::Io(_) | Error::Json(_) => ErrorKind::Input,
            Error::Domain(_)
            | Error::Singular { .. }
            | Error::Divergence { .. }
            | Error::SpectrumInHalfPlane { .. }
            | Error::Hypothesis(_)
            | Error::Conditioning(_) => ErrorKind::Hypothesis,
            Error::Saturation(_)
            | Error::IterationCap(_)
            | Error::Quadrature(_)
            | Error::Numeric(_) => ErrorKind::Numeric,
        }
    }
}
