use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("modulus {0} is not a prime below 2^63")]
    NotPrime(u64),
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not skew-symmetric (entry ({row}, {col}))")]
    NotSkewSymmetric { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("field of size {modulus} is too small: {needed} distinct evaluation points required")]
    FieldTooSmall { needed: u64, modulus: u64 },
    #[error("interpolation support of {size} monomials exceeds the cap of {cap}")]
    SupportTooLarge { size: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("line {index}: vectors must have length {expected}, got {got}")]
    WrongLength { index: usize, expected: usize, got: usize },
    #[error("line {index}: spanning vectors are linearly dependent modulo the prime")]
    DependentPair { index: usize },
    #[error("ambient dimension must be positive")]
    ZeroDimension,
    #[error("expected {expected} entries, got {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("half-integral entries are stored doubled and must lie in 0..=2, got {0}")]
    NotHalfIntegral(u8),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuardError {
    #[error("{what} = {got} exceeds the enumeration guard of {limit}")]
    Exceeded { what: &'static str, got: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("entry {value} at ({row}, {col}) is outside 0..=2")]
    BadEntry { row: usize, col: usize, value: i64 },
    #[error("column {col} sums to {sum}, expected 2")]
    BadColumnSum { col: usize, sum: i64 },
    #[error("expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("near-shortest factor {numer}/{denom} must lie in (0, 2]")]
    BadFactor { numer: u64, denom: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("weight {value} exceeds the configured cap {cap}")]
    CapExceeded { value: u64, cap: u64 },
    #[error("weights must be positive (entry {index} is zero)")]
    NonPositive { index: usize },
    #[error("line index {index} out of range for {len} lines")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid family parameters: {0}")]
    BadParams(String),
    #[error("expected {expected} weights, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed integer list: {0}")]
    IntegerList(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HittingSetError {
    #[error("field of size {modulus} is too small: the evaluation set needs {needed} elements")]
    FieldTooSmall { needed: u64, modulus: u64 },
    #[error("hitting set size overflows 128 bits")]
    TooLarge,
    #[error("instance has {got} lines but the family is for {expected}")]
    LineCountMismatch { expected: usize, got: usize },
}
