use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// A modal denominator vanished (only reachable without loss).
    #[error("degenerate denominator {which} at f = {f} Hz")]
    Degenerate { which: &'static str, f: f64 },
    /// Port-1 current is zero, so the input impedance is unbounded.
    #[error("open circuit at port 1 (k = {k}) at f = {f} Hz")]
    OpenCircuit { f: f64, k: i32 },
    #[error("phase unwrap failed at f = {f} Hz: step {step} rad exceeds π/2, reduce df")]
    Unwrap { f: f64, step: f64 },
}

impl CoreError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidParams(msg.into())
    }

    /// Frequency at which a numerical degeneracy occurred, if any.
    pub fn frequency(&self) -> Option<f64> {
        match self {
            CoreError::Degenerate { f, .. }
            | CoreError::OpenCircuit { f, .. }
            | CoreError::Unwrap { f, .. } => Some(*f),
            CoreError::InvalidParams(_) => None,
        }
    }
}
