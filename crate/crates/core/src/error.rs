use crate::algo::{AlgoId, Role};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dataset spec: {0}")]
    InvalidSpec(String),

    #[error("invalid relation: {0}")]
    InvalidRelation(String),

    #[error("bad magic bytes {found:?}, expected \"DQO1\"")]
    BadMagic { found: [u8; 4] },

    #[error("bad payload flag byte {0}")]
    BadPayloadFlag(u8),

    #[error("truncated relation file: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("relation file length mismatch: {trailing} trailing bytes after {n_rows} rows")]
    LengthMismatch { n_rows: u64, trailing: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("key {key} at row {row} is outside the dense domain [0, {n_groups})")]
    KeyOutOfRange {
        key: u32,
        row: usize,
        n_groups: usize,
    },

    #[error("key {key} recurs non-contiguously at row {row}")]
    NonContiguousKey { key: u32, row: usize },

    #[error("key {key} is not in the group directory")]
    KeyNotInDirectory { key: u32 },

    #[error("group directory is not strictly ascending at position {position}")]
    DirectoryNotAscending { position: usize },

    #[error("{side} input is not sorted by key at row {row}")]
    UnsortedInput { side: &'static str, row: usize },

    #[error("duplicate build key {key}")]
    DuplicateBuildKey { key: u32 },

    #[error("{algo} needs auxiliary input: {what}")]
    MissingAux { algo: AlgoId, what: &'static str },

    #[error("{algo} is not a {role} algorithm")]
    WrongRole { algo: AlgoId, role: Role },

    #[error("{algo} is not applicable to its inputs")]
    NotApplicable { algo: AlgoId },

    #[error("invalid cost input: {0}")]
    InvalidCostInput(String),

    #[error("invalid query stats: {0}")]
    InvalidStats(String),

    #[error("no applicable algorithm for the {0} node")]
    Infeasible(Role),

    #[error("plan is malformed: {0}")]
    MalformedPlan(String),

    #[error("grouping value {0} does not fit a 32-bit key")]
    GroupKeyOverflow(u64),

    #[error("unknown algorithm {0:?}")]
    UnknownAlgo(String),

    #[error("duplicate MAV id {0:?}")]
    DuplicateMav(String),

    #[error("MAV {id:?} is inapplicable: {reason}")]
    InapplicableMav { id: String, reason: String },

    #[error("registry line {line}: {msg}")]
    MavParse { line: usize, msg: String },
}
