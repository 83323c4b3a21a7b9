use alloc::string::String;
use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix dimension {dim} cannot hold a band of width {bandwidth}")]
    DimensionTooSmall { dim: usize, bandwidth: usize },

    #[error("grid has {0} nodes, at least 16 are required")]
    GridTooSmall(usize),

    #[error("grid nodes are not uniformly spaced")]
    NonUniformGrid,

    #[error("function is not negligible at the grid boundary (|f| = {0:e})")]
    BoundaryNotNegligible(f64),

    #[error("shift {0} is an eigenvalue to working precision")]
    AtEigenvalue(Complex64),

    #[error("dense eigensolver failed to converge")]
    EigenSolverFailed,

    #[error("degenerate symbol point for lambda = {lambda}: {reason}")]
    DegeneratePoint { lambda: Complex64, reason: &'static str },

    #[error("no radius in [{r_min}, {r_max}] passes the phase window tests")]
    NoValidWindow { r_min: f64, r_max: f64 },

    #[error("amplitude a_{j} exceeds 1e15 (sup norm {norm:e})")]
    SeriesBlowup { j: usize, norm: f64 },

    #[error("transport equation residual {residual:e} for a_{j} exceeds tolerance")]
    TransportResidual { j: usize, residual: f64 },

    #[error("certification refused at h = {h}: {reason}")]
    CertificationRefused { h: f64, reason: &'static str },

    #[error("algebraic residual {algebraic:e} and direct residual {direct:e} disagree")]
    CrossCheckFailed { algebraic: f64, direct: f64 },

    #[error("semiclassical parameter mismatch: mode has h = {mode}, scaling has h = {params}")]
    ScalingMismatch { mode: f64, params: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub(crate) fn invalid(msg: &str) -> Error {
    Error::InvalidParameter(String::from(msg))
}
