use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what}: size {count} exceeds the configured cap {cap}")]
    Sizing {
        what: &'static str,
        count: usize,
        cap: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands live on different Fock bases")]
    BasisMismatch,

    #[error("matrix is not Hermitian (max |A - A^H| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error(
        "two-body matrix is not symmetric under tensor-factor swap (max residual {residual:e})"
    )]
    SwapAsymmetry { residual: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("truncation defect {defect:e} exceeds tolerance {tolerance:e}; need N_max >= {required_n_max}")]
    Truncation {
        defect: f64,
        tolerance: f64,
        required_n_max: usize,
    },

    #[error("invariant violated at index {index}: {reason}")]
    Invariant { index: usize, reason: String },

    #[error("quadrature did not reach tolerance: estimate {value:e}, error {error:e}")]
    Quadrature { value: f64, error: f64 },

    #[error("divergent quantity: {0}")]
    Divergence(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("eigen-decomposition: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;
