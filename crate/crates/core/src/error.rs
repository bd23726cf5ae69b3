use thiserror::Error;

/// Errors raised by the numerical kernels and file parsers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count must be at least 1")]
    EmptyInstance,

    #[error("qubit count {n} exceeds the dense cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: {gammas} gammas vs {betas} betas")]
    LengthMismatch { gammas: usize, betas: usize },

    #[error("annealing did not converge within {steps} steps (last change {residual:.3e})")]
    AnnealingNotConverged { steps: usize, residual: f64 },

    #[error("fixed point did not converge after {iterations} iterations (residual {residual:.3e})")]
    FixedPointNotConverged { iterations: usize, residual: f64 },

    #[error("fixed-point iterate exploded at iteration {iteration} (max entry {norm:.3e})")]
    FixedPointDiverged { iteration: usize, norm: f64 },

    #[error("layer count {p} exceeds the cap of {cap}")]
    TooManyLayers { p: usize, cap: usize },

    #[error("imaginary residue {imag:.3e} exceeds {threshold:.1e}")]
    ImaginaryResidue { imag: f64, threshold: f64 },

    #[error("composition count {count} exceeds the cap of {cap}")]
    TooManyCompositions { count: f64, cap: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// True for failures of a numerical method on valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::AnnealingNotConverged { .. }
                | Error::FixedPointNotConverged { .. }
                | Error::FixedPointDiverged { .. }
                | Error::ImaginaryResidue { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
