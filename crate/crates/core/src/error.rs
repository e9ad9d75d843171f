use alloc::string::String;

/// Errors raised by the emulator core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("mode index {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("qubit index {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("integral table is not symmetric: {0}")]
    Symmetry(String),
    #[error("operator is not {expected}: {detail}")]
    NotHermitian { expected: &'static str, detail: String },
    #[error("gate matrix is not unitary (residual {residual:e})")]
    NonUnitary { residual: f64 },
    #[error("two-qubit gate on sites {0} and {1} is not adjacent")]
    NonAdjacent(usize, usize),
    #[error("Jacobi SVD did not converge in {sweeps} sweeps (off-orthogonality {off_orthogonality:e})")]
    NoConvergence { sweeps: usize, off_orthogonality: f64 },
    #[error("SVD backend failed: {0}")]
    Backend(String),
    #[error("expectation value has imaginary part {0:e}")]
    ImaginaryExpectation(f64),
    #[error("state too large for dense export: {0} qubits")]
    TooManyQubits(usize),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
}

pub type Result<T> = core::result::Result<T, Error>;
