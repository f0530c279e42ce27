use thiserror::Error;

/// Errors produced by the channel, simulation and fitting routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Kraus completeness violated: max |Σ E†E − I| = {0:.3e}")]
    NotComplete(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("only qubit channels (d = 2) are supported here, got d = {0}")]
    NotQubit(usize),

    #[error("{what} = {value} is outside the valid range {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: String,
    },

    #[error("χ-matrix is not diagonal (largest off-diagonal magnitude {0:.3e})")]
    NotDiagonal(f64),

    #[error("χ-matrix has linear terms (max |Re χ0k| = {0:.3e}); use the general measure")]
    LinearTerms(f64),

    #[error("grid density must be at least 8, got {0}")]
    GridTooCoarse(usize),

    #[error("wire {wire} out of range for a {wire_count}-wire register")]
    WireOutOfRange { wire: usize, wire_count: usize },

    #[error("wire {0} used more than once in a gate")]
    DuplicateWire(usize),

    #[error("gate matrix is not unitary (max |U†U − I| = {0:.3e})")]
    NotUnitary(f64),

    #[error("register of {0} qubits exceeds the simulator limit of {1}")]
    RegisterTooLarge(usize, usize),

    #[error("partial trace needs at least one wire to keep")]
    EmptyKeepSet,

    #[error("syndrome subspaces are not orthonormal (max Gram deviation {0:.3e})")]
    SyndromesOverlap(f64),

    #[error("{errors} correctable errors do not fit into {capacity} syndrome labels")]
    SyndromeSpaceTooSmall { errors: usize, capacity: usize },

    #[error("singular fit system: {0}")]
    SingularFit(String),

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("unknown {what} '{name}'")]
    UnknownName { what: &'static str, name: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
