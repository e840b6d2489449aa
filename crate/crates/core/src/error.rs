use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("quantity is undefined at zero polarization")]
    UndefinedAtZero,

    #[error("polarization equals the margin; the decision is undefined")]
    DecisionBoundary,

    #[error("outside the validity regime of the approximation")]
    OutOfRegime,

    #[error("no convergence after {cycles} cycles (last residual {residual:e})")]
    ConvergenceFailure { cycles: usize, residual: f64 },

    #[error("budget of {budget} qubits cannot pay for one cooled shot costing {cost}")]
    BudgetTooSmall { budget: usize, cost: usize },

    #[error("total probability drifted by {drift:e}")]
    NormalizationDrift { drift: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
