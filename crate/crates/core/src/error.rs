use thiserror::Error;

/// Errors produced by the gate analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid bipartition: {0}")]
    Bipartition(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("operator is not diagonal (max off-diagonal modulus {0:.3e})")]
    NotDiagonal(f64),

    #[error("operator is not unitary (||U^dag U - I||_F = {0:.3e})")]
    NotUnitary(f64),

    #[error("the two operators are proportional; their span is one-dimensional")]
    DegenerateSpan,

    #[error("operator Schmidt rank is not two: {0}")]
    NotSchmidtRankTwo(String),

    #[error("gate is not genuine: it factorizes across {0}")]
    NotGenuine(String),

    /// Two-party decompositions of Schmidt rank two come in continuous families.
    #[error("Schmidt decompositions of two-party gates are not unique; at least three parties are required")]
    BipartiteNotUnique,

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),

    #[error("parameter out of domain: {0}")]
    ParamDomain(String),

    #[error("point does not solve the k = 0 modulus system (residual {0:.3e})")]
    NotOnVariety(f64),

    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    SolverDiverged { residual: f64, iterations: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
