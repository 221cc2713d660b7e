use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid interval ({a}, {b}): left endpoint must be smaller")]
    InvalidInterval { a: f64, b: f64 },

    #[error("jump at x = {position} lies on the window boundary; perturb the window")]
    JumpOnBoundary { position: f64 },

    #[error("jump positions must be strictly increasing (index {index})")]
    UnsortedJumps { index: usize },

    #[error("jump height at x = {position} is zero or not finite")]
    DegenerateJump { position: f64 },

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("regions do not tile the window: {0}")]
    NonTiling(String),

    #[error("interface {index} does not match the adjacent regions: {reason}")]
    InterfaceMismatch { index: usize, reason: String },

    #[error("value {x} outside the admissible range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("point ({x}, {y}) lies on the jump set")]
    OnJumpSet { x: f64, y: f64 },

    #[error("boundary values do not match the reference: {0}")]
    CollarMismatch(String),

    #[error("inconsistent boundary labeling: {0}")]
    BoundaryLabeling(String),

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("quadrature did not converge on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },

    #[error("competitor generation failed after {attempts} attempts")]
    GenerationFailure { attempts: usize },

    #[error("optimizer failed: {0}")]
    Optimizer(String),

    #[error("schema violation at `{path}` (line {line}, column {column}): {message}")]
    Schema {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
