use core::fmt;

/// Everything that can go wrong inside the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum NmfError {
    /// Two operands have incompatible shapes.
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    /// Operation needs a square matrix.
    NotSquare { rows: usize, cols: usize },
    /// Zero rows or zero columns.
    EmptyMatrix,
    /// Value buffer length disagrees with the declared shape.
    BadLength { expected: usize, got: usize },
    /// NaN or infinity where a finite number is required.
    NonFinite { op: &'static str, row: usize, col: usize },
    /// Negative entry in an operand that must be nonnegative.
    NegativeEntry {
        op: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },
    /// A scalar parameter outside its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
    /// Factorization rank exceeds `min(p, n)`.
    RankTooLarge { rank: usize, rows: usize, cols: usize },
    /// KL divergence with a positive target against a zero reconstruction.
    DivergenceUndefined { row: usize, col: usize },
    /// Nearest-neighbor lookup against an empty training set.
    EmptyTrainingSet,
    /// Two label or feature sequences of different lengths.
    LengthMismatch { left: usize, right: usize },
}

pub type Result<T> = core::result::Result<T, NmfError>;

impl fmt::Display for NmfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NmfError::ShapeMismatch { op, left, right } => write!(
                f,
                "{op}: shape mismatch between {}x{} and {}x{}",
                left.0, left.1, right.0, right.1
            ),
            NmfError::NotSquare { rows, cols } => {
                write!(f, "expected a square matrix, got {rows}x{cols}")
            }
            NmfError::EmptyMatrix => f.write_str("matrix must have at least one row and one column"),
            NmfError::BadLength { expected, got } => {
                write!(f, "expected {expected} values, got {got}")
            }
            NmfError::NonFinite { op, row, col } => {
                write!(f, "{op}: non-finite value at ({row}, {col})")
            }
            NmfError::NegativeEntry { op, row, col, value } => {
                write!(f, "{op}: negative entry {value} at ({row}, {col})")
            }
            NmfError::InvalidParameter { name, value } => {
                write!(f, "invalid value {value} for parameter {name}")
            }
            NmfError::RankTooLarge { rank, rows, cols } => {
                write!(f, "rank {rank} exceeds min(p, n) for a {rows}x{cols} matrix")
            }
            NmfError::DivergenceUndefined { row, col } => write!(
                f,
                "KL divergence undefined: positive target with zero reconstruction at ({row}, {col})"
            ),
            NmfError::EmptyTrainingSet => f.write_str("training set is empty"),
            NmfError::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
        }
    }
}

impl core::error::Error for NmfError {}
