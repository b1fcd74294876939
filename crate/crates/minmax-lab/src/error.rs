use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("frame is not orthonormal (residual {0:.3e})")]
    NonOrthonormalInput(f64),
    #[error("quaternion is not unit (|q| = {0})")]
    NonUnitQuaternion(f64),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("degenerate metric at node {node} (det = {det:.3e})")]
    DegenerateMetric { node: usize, det: f64 },
    #[error("degenerate Gauss metric at node {0}")]
    DegenerateGaussMetric(usize),
    #[error("degree is not close to an integer (raw {raw}, residual {residual:.3e})")]
    AmbiguousDegree { raw: f64, residual: f64 },
    #[error("immersion is not minimal (sup |H| = {0:.3e})")]
    NotMinimal(f64),
    #[error("Moebius parameter on the boundary (|a| = {0})")]
    BoundaryParameter(f64),
    #[error("no unique nearest-point projection: {0}")]
    NoUniqueProjection(String),
    #[error("rescaled point leaves the chart: {0}")]
    ChartOverflow(String),
    #[error("line search rejected the step at slice {0}")]
    StepRejected(usize),
    #[error("no convergence after {iterations} iterations (gradient {grad:.3e})")]
    NoConvergence { iterations: usize, grad: f64 },
    #[error("configuration is not critical (gradient {0:.3e})")]
    NotCritical(f64),
    #[error("bad eigenbasis: {0}")]
    BadEigenbasis(String),
    #[error("bad level {0}")]
    BadLevel(usize),
    #[error("curve collapsed (length {0:.3e})")]
    CurveCollapse(f64),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
