use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at (or numerically at) a pole.
    #[error("pole: {0}")]
    Pole(String),

    /// A value type failed validation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The implicit boundary equation has no admissible root at this angle.
    #[error("no solution at theta = {theta}: outside the support")]
    NoSolution { theta: f64 },

    /// The angle is outside the closure of the support at this time.
    #[error("exterior point theta = {theta}")]
    ExteriorPoint { theta: f64 },

    /// Square-root branch could not be tracked continuously.
    #[error("branch tracking failed at z = {re} + {im}i")]
    Branch { re: f64, im: f64 },

    /// A characteristic came too close to a pole of the drift.
    #[error("singular approach at s = {s}, w = {re} + {im}i")]
    SingularApproach { s: f64, re: f64, im: f64 },

    /// The exit chart is not monotone along a ray even after refinement.
    #[error("exit chart fold on ray {angle}")]
    ChartFold { angle: f64 },

    /// Moment evolution left the unit interval.
    #[error("moment instability: |m_{k}| = {value} at t = {t}")]
    Instability { k: usize, value: f64, t: f64 },

    /// Iterative method failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
