use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlateError {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("unsupported geometry: curvature {curvature} with dimension {dimension}")]
    UnsupportedGeometry { curvature: i8, dimension: usize },

    #[error("ill-posed problem: sigma = {sigma} is not below the buckling threshold {threshold}")]
    IllPosed { sigma: f64, threshold: f64 },

    #[error("two-ball energy is unbounded below at a = {a}, sigma = {sigma} (denominator {denominator})")]
    Unbounded {
        a: f64,
        sigma: f64,
        denominator: f64,
    },

    #[error("grid too coarse: {cells} interior cells (need at least {required})")]
    Resolution { cells: usize, required: usize },

    #[error("conjugate gradients stopped after {iterations} iterations with relative residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("fields live on different grids")]
    DomainMismatch,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, PlateError>;
