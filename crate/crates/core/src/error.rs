use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("mesh is not connected")]
    Disconnected,
    #[error("operation requires a closed mesh")]
    OpenMesh,
    #[error("malformed mesh: {0}")]
    MalformedMesh(String),
    #[error("field is constant")]
    ConstantField,
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
    #[error("level {t} is not strictly inside the field range [{min}, {max}]")]
    LevelOutOfRange { t: f64, min: f64, max: f64 },
    #[error("degenerate superlevel set at t = {0}")]
    DegenerateLevelSet(f64),
    #[error("no eigenvalue bracket in [{lo}, {hi}]")]
    BracketNotFound { lo: f64, hi: f64 },
    #[error("constraint projection failed: {0}")]
    Projection(String),
    #[error("solver did not converge after {iterations} iterations (relative change {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("sparse factorization failed: matrix not positive definite at pivot {0}")]
    NotPositiveDefinite(usize),
    #[error("symmetrization overflow: measure ratio {0} exceeds the model sphere")]
    InconsistentBeta(f64),
    #[error("empty battery")]
    EmptyBattery,
    #[error("i/o: {0}")]
    Io(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
