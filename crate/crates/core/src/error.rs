use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight {0} is outside [0, 1]")]
    InvalidWeight(f64),

    #[error("{name} = {value} must be finite and strictly positive")]
    NonPositive { name: &'static str, value: f64 },

    #[error("expected a <= b, got a = {a}, b = {b}")]
    Orientation { a: f64, b: f64 },

    #[error("interval [{lo}, {hi}] is not contained in the domain of `{id}`")]
    OutOfDomain { id: String, lo: f64, hi: f64 },

    #[error("invalid quadrature configuration: {0}")]
    InvalidQuadConfig(String),

    #[error("quadrature did not converge after {levels} levels: estimate {estimate}, error estimate {error}")]
    QuadratureNonconvergence { estimate: f64, error: f64, levels: u32 },

    #[error("integrand is not finite at x = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("derivative bound {0} is not available")]
    MissingBound(&'static str),

    #[error("derivative {0} is not available and finite differences are disabled")]
    MissingDerivative(&'static str),

    #[error("curvature bounds must satisfy m <= M, got m = {m}, M = {big_m}")]
    InvalidCurvatureBounds { m: f64, big_m: f64 },

    #[error("function `{id}` violates midpoint convexity at ({x}, {y}) by {violation}")]
    NotConvex { id: String, x: f64, y: f64, violation: f64 },

    #[error("derivative of `{id}` disagrees with finite differences at x = {at}: {supplied} vs {estimated}")]
    DerivativeMismatch {
        id: String,
        at: f64,
        supplied: f64,
        estimated: f64,
    },

    #[error("unknown builtin function `{0}`")]
    UnknownFunction(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: max asymmetry {asymmetry}")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {min_eig}")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("matrix has non-finite entries")]
    NonFiniteMatrix,

    #[error("symmetric eigendecomposition did not converge")]
    EigenFailure,

    #[error("spectral function is undefined at eigenvalue {0}")]
    SpectralFunctionUndefined(f64),

    #[error("invalid suite configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
