use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("path enumeration exceeds the budget of {cap} paths")]
    BudgetExceeded { cap: u64 },
    #[error("run exceeded the step cap of {cap} moves (chain may not be recurrent)")]
    Runaway { cap: u64 },
    #[error("singular linear system")]
    Singular,
    #[error("iterative solve did not converge after {iterations} sweeps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("closed forms are only available at base point {expected}, got {got}")]
    UnsupportedBasePoint { expected: String, got: String },
    #[error("denominator {value:e} is below tolerance {tol:e}")]
    ZeroDenominator { value: f64, tol: f64 },
    #[error("predecessors are not available for state {0}")]
    MissingPredecessors(String),
    #[error("transition probabilities out of {state} sum to {sum}, not 1")]
    RowSum { state: String, sum: String },
    #[error("profile is not in the cone of boundary profiles: {0}")]
    NotInCone(String),
    #[error("state {0} lies outside the truncation window")]
    OutsideWindow(String),
    #[error("{0} is outside the table range")]
    OutOfRange(String),
    #[error("value is not rational: {0}")]
    NotRational(String),
    #[error("invalid boundary point `{0}`")]
    InvalidBoundary(String),
    #[error("invalid chain selector `{0}`")]
    InvalidChain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
