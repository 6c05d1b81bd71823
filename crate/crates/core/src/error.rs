use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exhausted after {reductions} reductions ({pairs_left} pairs pending)")]
    BudgetExhausted { reductions: u64, pairs_left: usize },
    #[error("Kahan requires quadratic vector field (component {component} has degree {degree})")]
    NotQuadratic { component: usize, degree: u32 },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model `{model}` has no parameter `{param}`")]
    UnknownParameter { model: String, param: String },
    #[error("newton step failed: {0}")]
    StepFailure(String),
    #[error("step {index} failed: {reason}")]
    OrbitFailure { index: usize, reason: String },
    #[error("no return to the section within horizon {horizon}")]
    NoReturn { horizon: f64 },
    #[error("strategy not applicable: {0}")]
    StrategyNotApplicable(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
