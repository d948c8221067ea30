//! Binary solution store.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! header (16 bytes)
//!   0..4   magic "SSDB"
//!   4..6   format version (u16) = 1
//!   6      board edge N (u8)
//!   7      endgame threshold E (u8): positions with <= E empties are solved on demand
//!   8..16  record count (u64)
//! record (24 bytes), sorted strictly ascending by (mover, opponent)
//!   0..8   canonical mover bitboard (u64)
//!   8..16  canonical opponent bitboard (u64)
//!   16..18 value, mover's perspective (i16)
//!   18     best move as a square index in the canonical orientation; 255 = pass
//!   19     kind flags: bit0 P, bit1 A', bit2 P'
//!   20..24 reserved, zero
//! ```
//!
//! Keys are canonical (see [`Position::canonical_form`]); a client maps the
//! stored move back through the inverse of the symmetry that canonicalized
//! its position.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kind::{KindFlags, NodeKind};
use crate::othello::{BoardSize, CanonicalKey, MoveStatus, Position, Score, Square};
use crate::solver::{solve_exact, SearchMode, SolverConfig};

pub const MAGIC: &[u8; 4] = b"SSDB";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;
pub const RECORD_LEN: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StoreHeader {
    pub version: u16,
    pub size: BoardSize,
    pub endgame_empties: u8,
    pub count: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolvedRecord {
    pub key: CanonicalKey,
    pub value: i16,
    /// Canonical-orientation square, or [`SolvedRecord::NO_MOVE`] for a pass.
    pub best_move: u8,
    pub kinds: u8,
}

impl SolvedRecord {
    pub const NO_MOVE: u8 = 255;

    pub fn has_kind(&self, kind: NodeKind) -> bool {
        let bit = match kind {
            NodeKind::P => KindFlags::SOLVED_P,
            NodeKind::APrime => KindFlags::SOLVED_APRIME,
            NodeKind::PPrime => KindFlags::SOLVED_PPRIME,
            _ => 0,
        };
        self.kinds & bit != 0
    }

    pub fn kind_names(&self) -> String {
        [NodeKind::P, NodeKind::APrime, NodeKind::PPrime]
            .into_iter()
            .filter(|k| self.has_kind(*k))
            .map(|k| k.name())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn encode(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.key.mover.to_le_bytes());
        out.extend_from_slice(&self.key.opponent.to_le_bytes());
        out.extend_from_slice(&self.value.to_le_bytes());
        out.push(self.best_move);
        out.push(self.kinds);
        out.extend_from_slice(&[0; 4]);
    }

    fn decode(b: &[u8]) -> (SolvedRecord, bool) {
        let u64_at = |i: usize| u64::from_le_bytes(b[i..i + 8].try_into().unwrap());
        let rec = SolvedRecord {
            key: CanonicalKey { mover: u64_at(0), opponent: u64_at(8) },
            value: i16::from_le_bytes([b[16], b[17]]),
            best_move: b[18],
            kinds: b[19],
        };
        (rec, b[20..24] == [0; 4])
    }
}

/// An immutable, sorted set of solved records plus the on-demand threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionDatabase {
    size: BoardSize,
    endgame_empties: u8,
    records: Vec<SolvedRecord>,
}

/// Result of [`SolutionDatabase::lookup`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Stored(SolvedRecord),
    /// Computed now; the move is in the queried position's orientation.
    OnDemand { value: Score, best_move: Option<Square> },
    /// Outside the guarantee: reachable only if the AI itself deviated.
    NotCovered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnswerStatus {
    Covered,
    OnDemand,
    NotCovered,
    Terminal,
}

impl AnswerStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            AnswerStatus::Covered => "covered",
            AnswerStatus::OnDemand => "on-demand",
            AnswerStatus::NotCovered => "not-covered",
            AnswerStatus::Terminal => "terminal",
        }
    }
}

/// Value and best move for a concrete position, move in that position's orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Answer {
    pub status: AnswerStatus,
    pub value: Option<Score>,
    /// `None` with a value means pass (or no move at a terminal position).
    pub best_move: Option<Square>,
}

impl SolutionDatabase {
    /// Validates and wraps records (sorted, unique, well-formed).
    pub fn new(size: BoardSize, endgame_empties: u8, records: Vec<SolvedRecord>) -> Result<SolutionDatabase> {
        validate(size, &records).map_err(Error::InvalidRecords)?;
        Ok(SolutionDatabase { size, endgame_empties, records })
    }

    pub fn header(&self) -> StoreHeader {
        StoreHeader {
            version: FORMAT_VERSION,
            size: self.size,
            endgame_empties: self.endgame_empties,
            count: self.records.len() as u64,
        }
    }

    pub fn size(&self) -> BoardSize {
        self.size
    }

    pub fn endgame_empties(&self) -> u32 {
        self.endgame_empties as u32
    }

    pub fn records(&self) -> &[SolvedRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, key: &CanonicalKey) -> Option<&SolvedRecord> {
        self.records.binary_search_by(|r| r.key.cmp(key)).ok().map(|i| &self.records[i])
    }

    /// Copy with `records` replaced (used to build faulty fixtures and subsets).
    pub fn with_records(&self, records: Vec<SolvedRecord>) -> Result<SolutionDatabase> {
        SolutionDatabase::new(self.size, self.endgame_empties, records)
    }

    pub fn lookup(&self, p: &Position) -> Lookup {
        if let Some(r) = self.get(&p.canonicalize()) {
            return Lookup::Stored(*r);
        }
        if p.is_terminal() {
            return Lookup::OnDemand { value: p.terminal_score(), best_move: None };
        }
        if p.empties() <= self.endgame_empties as u32 {
            let (value, best_move) = solve_on_demand(p);
            return Lookup::OnDemand { value, best_move };
        }
        Lookup::NotCovered
    }

    pub fn answer(&self, p: &Position) -> Answer {
        if p.is_terminal() {
            return Answer { status: AnswerStatus::Terminal, value: Some(p.terminal_score()), best_move: None };
        }
        match self.lookup(p) {
            Lookup::Stored(r) => {
                let (_, sym) = p.canonical_form();
                let best_move = (r.best_move != SolvedRecord::NO_MOVE)
                    .then(|| Square(sym.inverse().map_square(self.size, r.best_move)));
                Answer { status: AnswerStatus::Covered, value: Some(r.value as Score), best_move }
            }
            Lookup::OnDemand { value, best_move } => {
                Answer { status: AnswerStatus::OnDemand, value: Some(value), best_move }
            }
            Lookup::NotCovered => Answer { status: AnswerStatus::NotCovered, value: None, best_move: None },
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + RECORD_LEN * self.records.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(self.size.edge() as u8);
        out.push(self.endgame_empties);
        out.extend_from_slice(&(self.records.len() as u64).to_le_bytes());
        for r in &self.records {
            r.encode(&mut out);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<SolutionDatabase> {
        let corrupt = |reason: String| Error::CorruptStore { path: path.to_path_buf(), reason };
        if bytes.len() < HEADER_LEN {
            return Err(corrupt(format!("file is {} bytes, shorter than the header", bytes.len())));
        }
        if &bytes[0..4] != MAGIC {
            return Err(corrupt("bad magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != FORMAT_VERSION {
            return Err(corrupt(format!("unsupported format version {version}")));
        }
        let size = BoardSize::from_edge(bytes[6] as u32).ok_or_else(|| corrupt(format!("board size {}", bytes[6])))?;
        let endgame_empties = bytes[7];
        let count = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
        let body = &bytes[HEADER_LEN..];
        if body.len() as u64 != count.saturating_mul(RECORD_LEN as u64) {
            return Err(corrupt(format!("header says {count} records but body holds {} bytes", body.len())));
        }
        let mut records = Vec::with_capacity(count as usize);
        for chunk in body.chunks_exact(RECORD_LEN) {
            let (rec, reserved_ok) = SolvedRecord::decode(chunk);
            if !reserved_ok {
                return Err(corrupt(format!("nonzero reserved bytes in record {}", records.len())));
            }
            records.push(rec);
        }
        validate(size, &records).map_err(corrupt)?;
        Ok(SolutionDatabase { size, endgame_empties, records })
    }
}

fn validate(size: BoardSize, records: &[SolvedRecord]) -> std::result::Result<(), String> {
    let max = size.squares() as i16;
    for (i, r) in records.iter().enumerate() {
        if i > 0 && records[i - 1].key >= r.key {
            return Err(format!("records {} and {} are not strictly ascending", i - 1, i));
        }
        if r.kinds == 0 || r.kinds & !KindFlags::EXACT_MASK != 0 {
            return Err(format!("record {i} has kind flags {:#04x}", r.kinds));
        }
        if !(-max..=max).contains(&r.value) {
            return Err(format!("record {i} value {} out of range", r.value));
        }
        let p = Position::new(size, r.key.mover, r.key.opponent).map_err(|e| format!("record {i}: {e}"))?;
        match (p.move_status(), r.best_move) {
            (MoveStatus::HasMoves(m), mv) if mv != SolvedRecord::NO_MOVE && m.contains(Square(mv)) => {}
            (MoveStatus::MustPass, SolvedRecord::NO_MOVE) => {}
            _ => return Err(format!("record {i} best move {} is not legal", r.best_move)),
        }
    }
    Ok(())
}

/// Solves a small position exactly, returning a value-attaining move.
pub fn solve_on_demand(p: &Position) -> (Score, Option<Square>) {
    let mut config = SolverConfig::for_size(p.size());
    config.table_log2 = 14;
    config.shortcut_empties = 0;
    let mut engine = config.engine(p.size(), SearchMode::AlphaBeta);
    solve_exact(&mut engine, p)
}

pub fn write_store(db: &SolutionDatabase, path: &Path) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(&db.to_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn open_store(path: &Path) -> Result<SolutionDatabase> {
    let bytes = fs::read(path)?;
    SolutionDatabase::from_bytes(&bytes, path)
}

/// Tab-separated audit listing: mover, opponent, value, best move, kinds.
pub fn dump_tsv(db: &SolutionDatabase, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "mover\topponent\tvalue\tbest_move\tkinds")?;
    for r in db.records() {
        let mv = if r.best_move == SolvedRecord::NO_MOVE {
            "ps".to_string()
        } else {
            Square(r.best_move).name(db.size())
        };
        writeln!(out, "{:016x}\t{:016x}\t{}\t{}\t{}", r.key.mover, r.key.opponent, r.value, mv, r.kind_names())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(p: Position, value: i16, kinds: u8) -> SolvedRecord {
        let (key, sym) = p.canonical_form();
        let mv = p.legal_moves().trailing_zeros() as u8;
        SolvedRecord { key, value, best_move: sym.map_square(p.size(), mv), kinds }
    }

    fn sample() -> SolutionDatabase {
        let root = Position::initial(BoardSize::Four);
        let child = root.play(Square(root.legal_moves().trailing_zeros() as u8));
        let mut recs = vec![record(root, -8, 1), record(child, 8, 3)];
        recs.sort_by_key(|r| r.key);
        SolutionDatabase::new(BoardSize::Four, 0, recs).unwrap()
    }

    #[test]
    fn empty_store_is_header_only() {
        let db = SolutionDatabase::new(BoardSize::Six, 10, vec![]).unwrap();
        let bytes = db.to_bytes();
        assert_eq!(bytes.len(), 16);
        assert_eq!(&bytes[0..4], b"SSDB");
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 0);
    }

    #[test]
    fn bytes_round_trip() {
        let db = sample();
        let bytes = db.to_bytes();
        assert_eq!(bytes.len(), 16 + 2 * 24);
        assert_eq!(SolutionDatabase::from_bytes(&bytes, Path::new("x")).unwrap(), db);
    }

    #[test]
    fn corrupt_headers_are_rejected() {
        let good = sample().to_bytes();
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(SolutionDatabase::from_bytes(&bad, Path::new("x")).is_err());
        let mut bad = good.clone();
        bad[4] = 9;
        assert!(SolutionDatabase::from_bytes(&bad, Path::new("x")).is_err());
        let mut bad = good.clone();
        bad[8] = 3;
        assert!(SolutionDatabase::from_bytes(&bad, Path::new("x")).is_err());
        assert!(SolutionDatabase::from_bytes(&good[..10], Path::new("x")).is_err());
        let mut bad = good.clone();
        bad[16 + 21] = 1;
        assert!(SolutionDatabase::from_bytes(&bad, Path::new("x")).is_err());
    }

    #[test]
    fn unsorted_records_are_rejected() {
        let db = sample();
        let mut recs = db.records().to_vec();
        recs.reverse();
        assert!(matches!(db.with_records(recs.clone()), Err(Error::InvalidRecords(_))));
        // swap the two records directly in the byte image
        let mut bytes = db.to_bytes();
        let (a, b) = bytes[16..].split_at_mut(24);
        a.swap_with_slice(&mut b[..24]);
        assert!(matches!(SolutionDatabase::from_bytes(&bytes, Path::new("x")), Err(Error::CorruptStore { .. })));
        let mut dup = db.records().to_vec();
        dup[1] = dup[0];
        assert!(db.with_records(dup).is_err());
    }

    #[test]
    fn illegal_best_move_is_rejected() {
        let db = sample();
        let mut recs = db.records().to_vec();
        recs[0].best_move = 0;
        assert!(db.with_records(recs).is_err());
    }

    #[test]
    fn answer_maps_moves_back_to_the_query_orientation() {
        let db = sample();
        let root = Position::initial(BoardSize::Four);
        let a = db.answer(&root);
        assert_eq!(a.status, AnswerStatus::Covered);
        assert_eq!(a.value, Some(-8));
        let mv = a.best_move.unwrap();
        assert_ne!(root.flips(mv), 0);
        // every symmetric image of the root gets a legal move back
        for sym in crate::Symmetry::all() {
            let q = root.transform(sym);
            let a = db.answer(&q);
            assert!(q.flips(a.best_move.unwrap()) != 0);
        }
    }

    #[test]
    fn uncovered_and_terminal_answers() {
        let db = sample();
        let root = Position::initial(BoardSize::Four);
        let far = root.play(Square(root.legal_moves().trailing_zeros() as u8));
        let far = far.play(Square(far.legal_moves().trailing_zeros() as u8));
        assert_eq!(db.lookup(&far), Lookup::NotCovered);
        let full = Position::from_bits_unchecked(BoardSize::Four, 0xffff, 0);
        let a = db.answer(&full);
        assert_eq!((a.status, a.value), (AnswerStatus::Terminal, Some(16)));
    }
}
