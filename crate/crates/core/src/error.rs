use thiserror::Error;

/// Errors raised by the inference routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("self-loop on edge ({0}, {1})")]
    SelfLoop(usize, usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),

    #[error("graph is disconnected: vertex {0} is unreachable from vertex 0")]
    Disconnected(usize),

    #[error("invalid graph specification: {0}")]
    InvalidGraphSpec(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("mode error: {0}")]
    Mode(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("enumeration needs {states} states but the budget is {budget}")]
    BudgetExceeded { states: f64, budget: u64 },

    #[error("degenerate model: partition function is {0}")]
    Degenerate(f64),

    #[error("table is not real: imaginary part {imag:e} at index {index}")]
    NotReal { index: usize, imag: f64 },

    #[error("singular mapping: factor entry {index} is zero")]
    SingularMapping { index: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),
}

impl Error {
    /// True for errors caused by the caller's input, false for numeric failures.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Numeric(_) | Error::Degenerate(_) | Error::NotReal { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
