use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("chart is not an immersion at y = ({:.6}, {:.6}): |a1 x a2| = {norm:.3e}", y[0], y[1])]
    DegenerateChart { y: [f64; 2], norm: f64 },

    #[error(
        "thickness exceeds curvature radius at y = ({:.6}, {:.6}), x3 = {x3}, eps = {eps}: oriented volume ratio sqrt(g) / sqrt(a) = {ratio:.3e}",
        y[0], y[1]
    )]
    ThicknessExceedsCurvature { y: [f64; 2], x3: f64, eps: f64, ratio: f64 },

    #[error("half-thickness must be positive, got {0}")]
    ZeroThickness(f64),

    #[error("invalid Lame constants: lambda = {lambda}, mu = {mu} (need lambda >= 0, mu > 0)")]
    InvalidLame { lambda: f64, mu: f64 },

    #[error("second derivatives of the transverse component are required for the change of curvature")]
    MissingSecondDerivatives,

    #[error("invalid mesh resolution {n1} x {n2}")]
    InvalidResolution { n1: usize, n2: usize },

    #[error("prism layer count must be even and >= 2, got {0}")]
    OddLayerCount(usize),

    #[error("function spaces are not built on the same mesh")]
    SpaceMeshMismatch,

    #[error("transverse space {0} is not C1; flexural forms need the reduced HCT space")]
    WrongTransverseSpace(String),

    #[error("surface is not elliptic at y = ({:.6}, {:.6}): kappa = {kappa:.3e}", y[0], y[1])]
    NotElliptic { y: [f64; 2], kappa: f64 },

    #[error("penalty must be positive, got {0}")]
    InvalidPenalty(f64),

    #[error("matrix is not positive definite (Cholesky pivot failure)")]
    NotPositiveDefinite,

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("conjugate gradients did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("residual {residual:.3e} above solver threshold {threshold:.1e}")]
    ResidualTooLarge { residual: f64, threshold: f64 },

    #[error("fields are not defined on compatible surface meshes: {0}")]
    MeshMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
