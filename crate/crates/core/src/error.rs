use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported board size {0} (expected 4 or 6)")]
    UnsupportedSize(u32),

    #[error("illegal move {square} in position {position}")]
    IllegalMove { square: String, position: String },

    #[error("contract violation: {0}")]
    Contract(&'static str),

    #[error("invalid position: {0}")]
    InvalidPosition(String),

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("capacity of {limit} entries exceeded in {what}")]
    Capacity { what: &'static str, limit: usize },

    #[error("census key storage exhausted; rows {first}..={last} are complete")]
    CensusCapacity { first: u32, last: u32 },

    #[error("spill budget of {budget} bytes exceeded; last complete level has {last_complete} discs")]
    SpillBudget { budget: u64, last_complete: u32 },

    #[error("corrupt solution store {path:?}: {reason}")]
    CorruptStore { path: PathBuf, reason: String },

    #[error("invalid record set: {0}")]
    InvalidRecords(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
