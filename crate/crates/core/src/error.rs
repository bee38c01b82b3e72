use thiserror::Error;

/// Every failure the engine can report. Checks never panic on bad input;
/// they surface one of these instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands were built over different generator tables")]
    TableMismatch,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid generator table: {0}")]
    InvalidTable(String),
    #[error("operands are expanded around different base points")]
    BaseMismatch,
    #[error("jet order exhausted: need {needed}, have {available}")]
    OrderUnderflow { needed: usize, available: usize },
    #[error("body constant vanishes at the base point; move the base point ({0})")]
    SingularBody(String),
    #[error("invalid theta substitution: {0}")]
    InvalidSubstitution(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dimension {0} too large for Leibniz determinant (max 6)")]
    DimensionTooLarge(usize),
    #[error("input is not holomorphic: {0}")]
    NonHolomorphic(String),
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("chain law fails at link {0}")]
    ChainViolation(usize),
    #[error("degenerate seed: |z_{0}|^2 has vanishing body")]
    DegenerateSeed(usize),
    #[error("superform is not closed; no potential exists")]
    NotClosed,
    #[error("spectral parameter is off the unit circle: |lambda|^2 = {0}")]
    OffCircle(String),
    #[error("beta_{0} = -1: frame ansatz is not invertible")]
    NonInvertibleAnsatz(usize),
    #[error("matrix is not a hermitian rank-one projector: {0}")]
    NonProjector(String),
    #[error("constant matrix is not unitary")]
    NonUnitary,
    #[error("reduction needs exactly one eta pair: {0}")]
    UnsupportedReduction(String),
    #[error("closed-form precondition violated: {0}")]
    Precondition(String),
    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
