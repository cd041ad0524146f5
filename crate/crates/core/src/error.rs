use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExnerError {
    /// A parameter violates its admissible range.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The exact solution (or a law derivative) is undefined at this point.
    #[error("outside validity domain at x = {x}: {reason}")]
    Domain { x: f64, reason: String },

    /// A configuration key or value was rejected.
    #[error("config error: {0}")]
    Config(String),

    /// Water depth fell to zero or below after an update.
    #[error("positivity failure at cell {cell} (x = {x}): h = {h}")]
    Positivity { cell: usize, x: f64, h: f64 },

    /// A non-finite state or a runaway wave speed.
    #[error("divergence at cell {cell} (x = {x})")]
    Divergence { cell: usize, x: f64 },

    /// The time loop exceeded its step budget.
    #[error("time loop did not terminate: {steps} steps taken, t = {t} < T = {t_end}")]
    NonTermination { steps: usize, t: f64, t_end: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl ExnerError {
    /// True for failures of the numerical integration itself.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            ExnerError::Positivity { .. }
                | ExnerError::Divergence { .. }
                | ExnerError::NonTermination { .. }
        )
    }
}

impl From<std::io::Error> for ExnerError {
    fn from(e: std::io::Error) -> Self {
        ExnerError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ExnerError>;
