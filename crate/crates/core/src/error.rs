use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("particle number must be at least 1")]
    ZeroParticles,

    #[error("level count d must be at least 1")]
    ZeroLevels,

    #[error("particle number {n} exceeds the supported maximum {max}")]
    TooManyParticles { n: usize, max: usize },

    #[error("malformed partition {0:?}: {1}")]
    MalformedPartition(Vec<usize>, &'static str),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown mode or constant `{0}`")]
    UnknownIdentifier(String),

    #[error("derived mode `{name}` has squared norm {norm_sq}, expected 1")]
    NonUnitMode { name: String, norm_sq: f64 },

    #[error("all amplitudes cancel; the state has zero norm")]
    ZeroNorm,

    #[error("state is not permutation symmetric (deviation {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("inter-sector coherence {0:e} in the visible density matrix")]
    SectorCoherence(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("photon number mismatch: expected {expected}, found {found}")]
    PhotonNumberMismatch { expected: usize, found: usize },

    #[error("measurement settings span rank {rank}, need {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("no counts to reconstruct from")]
    NoData,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
