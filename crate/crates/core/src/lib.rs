//! Semi-strong solving of small Othello boards with reopening alpha-beta
//! search, plus the tools to check it: a brute-force oracle, position
//! censuses, node-count theory and a binary solution store.

pub mod census;
pub mod error;
pub mod kind;
pub mod oracle;
pub mod othello;
pub mod solver;
pub mod store;
pub mod theory;

pub use error::{Error, Result};
pub use kind::{child_kind, tt_admissible, KindFlags, NodeKind, SearchWindow};
pub use othello::{initial_position, BoardSize, CanonicalKey, MoveSet, MoveStatus, Position, Score, Square, Symmetry};
