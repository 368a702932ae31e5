use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain length {len}: {reason}")]
    InvalidLength { len: usize, reason: &'static str },

    #[error("coefficient array `{name}` has length {got}, expected {expected}")]
    LengthMismatch {
        name: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("central block is not in restricted exceptional-point form (ep residual {residual:e})")]
    NotRestrictedEp { residual: f64 },

    #[error("degenerate transfer product: eta_{index} = b_{index} c_{index} vanishes")]
    DegenerateEta { index: usize },

    #[error("matrix size {len} exceeds the oracle guard of {max}")]
    OracleGuard { len: usize, max: usize },

    #[error("QR iteration did not converge for eigenvalue index {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("eigenvector residual {residual:e} exceeds bound {bound:e} at lambda = {lambda}")]
    EigenvectorResidual {
        lambda: num_complex::Complex64,
        residual: f64,
        bound: f64,
    },

    #[error("singular linear system")]
    Singular,

    #[error("time step unstable: norm grew from {from} to {to} under an absorbing Hamiltonian")]
    Unstable { from: f64, to: f64 },

    #[error("malformed spec document: {0}")]
    Json(String),
}

impl Error {
    /// Numerical failures (as opposed to bad input) map to a distinct exit status in the CLI.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::EigenvectorResidual { .. } | Error::Singular | Error::Unstable { .. }
        )
    }
}
