use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("iCounter state must be nonzero")]
    ZeroCounter,

    #[error("nibble value {0} out of range (expected 0..=15)")]
    NibbleOutOfRange(u32),

    #[error("sbox table is not a bijection, cannot invert")]
    NonBijectiveSbox,

    #[error("mask layer not invertible (matrix rank {rank} < 160)")]
    SingularMatrix { rank: usize },

    #[error("invalid hex for {field}: {reason}")]
    InvalidHex { field: &'static str, reason: String },

    #[error("{field} must be {expected} bytes, got {actual}")]
    InvalidLength {
        field: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("malformed fault spec `{0}` (expected e.g. `w12=0,w30=1`)")]
    BadFaultSpec(String),

    #[error("unknown wire w{wire} (netlist has {wires} wires)")]
    UnknownWire { wire: usize, wires: usize },

    #[error("wire w{0} assigned more than once")]
    DuplicateWire(usize),

    #[error("max order {0} out of range (1..=3)")]
    MaxOrderOutOfRange(usize),

    #[error("no usable hotspot: every fault combination leaves the sbox output bijective")]
    NoUsableHotspot,

    #[error("fault combination `{0}` not found among the records")]
    UnknownCombination(String),

    #[error("candidates not converged, survivors per nibble: {survivors:?}")]
    NotConverged { survivors: Vec<u8> },

    #[error("inversion sanity failed: padding bits of the recovered key block are nonzero")]
    InversionSanity,

    #[error("model inconsistency: candidate set for nibble {nibble} became empty")]
    ModelInconsistency { nibble: usize },

    #[error("soundness violation: true key nibble {nibble} was eliminated at query {query}")]
    SoundnessViolation { nibble: usize, query: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
