use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not Hermitian: defect {defect:e} exceeds tolerance {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not unitary: defect {defect:e} exceeds tolerance {tol:e}")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("matrix is not anti-Hermitian: defect {defect:e} exceeds tolerance {tol:e}")]
    NotAntiHermitian { defect: f64, tol: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("rejection sampling gave up after {0} attempts")]
    SamplingFailure(usize),

    #[error(
        "input lies on the boundary stratum (interlacing margin {margin:e} below {required:e}); \
         only diagonal boundary points are supported"
    )]
    BoundaryStratum { margin: f64, required: f64 },

    #[error("ray continuation failed at u = {u:e}: phase overlap {overlap:.3} below 0.5")]
    ContinuationFailure { u: f64, overlap: f64 },

    #[error("twist residual {residual:e} exceeds tolerance {tol:e}")]
    TwistResidual { residual: f64, tol: f64 },

    #[error("bivector antisymmetry defect {0:e} signals inconsistent pairing conventions")]
    Convention(f64),

    #[error("gauge transform undefined: 1 + σπ has condition number {0:e}")]
    GaugeDomain(f64),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
