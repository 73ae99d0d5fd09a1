use thiserror::Error;

/// Errors raised by matrix, state, and channel construction.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{op}: dimension mismatch between {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix data has length {len}, expected {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, len: usize },

    #[error("not Hermitian: max |m_ij - conj(m_ji)| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace}, deviation from 1 is {deviation:e}")]
    BadTrace { trace: f64, deviation: f64 },

    #[error("state vector norm is {norm}, not 1")]
    NotNormalized { norm: f64 },

    #[error("not unitary: max |(UU^dag - I)_ij| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("Kraus completeness violated: max |(sum E^dag E - I)_ij| = {deviation:e}")]
    Incomplete { deviation: f64 },

    #[error("state is not pure: purity {purity}")]
    NotPure { purity: f64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid projector set: {0}")]
    InvalidProjectors(String),

    #[error("projector set is not aligned with the computational basis")]
    NotBasisAligned,

    #[error("off-block sum has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
