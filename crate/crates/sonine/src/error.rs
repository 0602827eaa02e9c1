use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pole of {function} at {location}")]
    Pole { function: &'static str, location: Complex64 },

    #[error("grid mismatch: operands live on different grids")]
    GridMismatch,

    #[error("dilation factor {theta} is not a grid step e^(m*delta)")]
    IncompatibleDilation { theta: f64 },

    #[error("series does not converge: {0}")]
    SeriesDivergence(String),

    #[error("kernel route not valid here: {0}")]
    RouteDomain(String),

    #[error("kernel route cross-check failed: series {series}, quadrature {quadrature}, relative gap {gap:.3e}")]
    RouteCrosscheck { series: Complex64, quadrature: Complex64, gap: f64 },

    #[error("oscillatory quadrature failed to converge (u={u}, reached {panels} panels)")]
    QuadratureStall { u: f64, panels: usize },

    #[error("Cauchy disc of radius {radius} around {center} collides with a pole")]
    RadiusCollision { center: Complex64, radius: f64 },

    #[error("no null direction below tolerance; smallest singular value {smallest_sv:.3e}")]
    EmptyFrame { smallest_sv: f64 },

    #[error("compressed eigenvalue {value:.6} drifted farther than {limit} from +/-1")]
    EigenvalueDrift { value: f64, limit: f64 },

    #[error("representer is degenerate: norm {norm:.3e}")]
    DegenerateRepresenter { norm: f64 },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("missing artifact: {path}")]
    MissingArtifact { path: String },

    #[error("malformed artifact {path}: {reason}")]
    MalformedArtifact { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
