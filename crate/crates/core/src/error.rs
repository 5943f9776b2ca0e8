use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// One failed density-matrix invariant and how far it is off.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Largest entrywise `|M_rc - conj(M_cr)|`.
    Hermiticity { deviation: f64 },
    /// `Tr(M) - 1` (real part; the imaginary part is folded into hermiticity).
    Trace { deviation: f64 },
    /// Most negative eigenvalue.
    Psd { min_eigenvalue: f64 },
    /// Layout dimension product vs matrix dimension.
    Layout { expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Hermiticity { deviation } => {
                write!(f, "hermiticity violated by {deviation:.3e}")
            }
            Violation::Trace { deviation } => write!(f, "trace violated by {deviation:.3e}"),
            Violation::Psd { min_eigenvalue } => {
                write!(f, "positivity violated: eigenvalue {min_eigenvalue:.3e}")
            }
            Violation::Layout { expected, found } => write!(
                f,
                "layout dimension {expected} does not match matrix dimension {found}"
            ),
        }
    }
}

/// Newtype so the list of violations can be displayed inside [`Error`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violations(pub Vec<Violation>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, v) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(Violations),
    #[error("operator is not unitary (||U^dag U - I||_F = {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("eigenvalue {value:.3e} below positivity tolerance")]
    NegativeEigenvalue { value: f64 },
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cross operator U_{i} rho U_{j}^dag vanishes; the spec is corrupted")]
    ZeroCrossOperator { i: usize, j: usize },
    #[error("value {value:.3e} of a_{index} is negative")]
    NegativeDiagonal { index: usize, value: f64 },
    #[error("filter succeeds with probability {probability:.3e}; filter is degenerate")]
    DegenerateFilter { probability: f64 },
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("operation needs a bipartite state, got {parties} parties")]
    NotBipartite { parties: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
