use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |M - M^dagger| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("bond {bond} is out of range for a chain of {sites} sites")]
    BondOutOfRange { sites: usize, bond: usize },

    #[error("chain length {0} is outside the supported range 2..=8")]
    SitesOutOfRange(usize),

    #[error("syntax error at {line}:{column}: expected {}, found {found}", expected.join(" | "))]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },

    #[error("sites {sites:?} are used by more than one factor of a tensor product")]
    DisjointnessViolation { sites: Vec<u8> },

    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),

    #[error("arcs ({0}, {1}) and ({2}, {3}) cross; only planar diagrams are supported")]
    NonPlanar(u8, u8, u8, u8),

    #[error("empty {0} in diagram")]
    EmptyDiagram(&'static str),

    #[error("Gram-Schmidt residual norm {0:e} is too small to normalize")]
    DegenerateGramSchmidt(f64),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}
