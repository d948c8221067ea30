//! N×N Othello rules on side-relative bitboards.
//!
//! A [`Position`] stores the discs of the player to move (`mover`) and of the
//! other player (`opponent`). Colors never appear: a position with Black to
//! move and the color-swapped position with White to move are the same value.

mod geometry;
mod symmetry;

use std::fmt;

pub use geometry::BoardSize;
pub use symmetry::Symmetry;

use crate::error::{Error, Result};

/// Disc-difference score from the mover's perspective.
pub type Score = i32;

/// A board square, `row * N + column`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Square(pub u8);

impl Square {
    pub fn from_coords(size: BoardSize, row: u32, col: u32) -> Square {
        Square((row * size.edge() + col) as u8)
    }

    #[inline]
    pub fn index(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn bit(self) -> u64 {
        1u64 << self.0
    }

    /// Text form such as `c4` (column letter, 1-based row).
    pub fn name(self, size: BoardSize) -> String {
        let edge = size.edge();
        let col = (b'a' + (self.index() % edge) as u8) as char;
        format!("{}{}", col, self.index() / edge + 1)
    }

    pub fn parse(text: &str, size: BoardSize) -> Result<Square> {
        let err = || Error::Parse { what: "square", input: text.to_string() };
        let mut chars = text.chars();
        let col = chars.next().ok_or_else(err)?.to_ascii_lowercase();
        let row: u32 = chars.as_str().parse().map_err(|_| err())?;
        let edge = size.edge();
        if !col.is_ascii_lowercase() {
            return Err(err());
        }
        let col = col as u32 - 'a' as u32;
        if col >= edge || row == 0 || row > edge {
            return Err(err());
        }
        Ok(Square::from_coords(size, row - 1, col))
    }
}

/// A set of squares as a bitmask; iterates in ascending square order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct MoveSet(pub u64);

impl MoveSet {
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, sq: Square) -> bool {
        self.0 & sq.bit() != 0
    }

    pub fn iter(self) -> MoveSetIter {
        MoveSetIter(self.0)
    }
}

impl IntoIterator for MoveSet {
    type Item = Square;
    type IntoIter = MoveSetIter;

    fn into_iter(self) -> MoveSetIter {
        MoveSetIter(self.0)
    }
}

pub struct MoveSetIter(u64);

impl Iterator for MoveSetIter {
    type Item = Square;

    #[inline]
    fn next(&mut self) -> Option<Square> {
        if self.0 == 0 {
            return None;
        }
        let sq = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(Square(sq as u8))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveStatus {
    HasMoves(MoveSet),
    /// The mover has no move but the opponent does.
    MustPass,
    /// Neither side can move.
    Terminal,
}

/// Symmetry-reduced identity of a position: the smallest `(mover, opponent)`
/// pair over the eight dihedral images.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub mover: u64,
    pub opponent: u64,
}

impl CanonicalKey {
    pub fn to_position(self, size: BoardSize) -> Position {
        Position::from_bits_unchecked(size, self.mover, self.opponent)
    }

    #[inline]
    pub fn as_u128(self) -> u128 {
        (self.mover as u128) << 64 | self.opponent as u128
    }

    #[inline]
    pub fn from_u128(v: u128) -> CanonicalKey {
        CanonicalKey { mover: (v >> 64) as u64, opponent: v as u64 }
    }

    #[inline]
    pub fn discs(self) -> u32 {
        (self.mover | self.opponent).count_ones()
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}:{:016x}", self.mover, self.opponent)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Position {
    mover: u64,
    opponent: u64,
    size: BoardSize,
}

/// The starting position: White on the upper-left/lower-right central
/// diagonal, Black on the other, Black to move. For 6×6 that is White c3 d4,
/// Black d3 c4; for 4×4 White b2 c3, Black c2 b3.
pub fn initial_position(edge: u32) -> Result<Position> {
    let size = BoardSize::from_edge(edge).ok_or(Error::UnsupportedSize(edge))?;
    Ok(Position::initial(size))
}

impl Position {
    pub fn initial(size: BoardSize) -> Position {
        let c = size.edge() / 2;
        let sq = |r, col| Square::from_coords(size, r, col).bit();
        let white = sq(c - 1, c - 1) | sq(c, c);
        let black = sq(c - 1, c) | sq(c, c - 1);
        Position { mover: black, opponent: white, size }
    }

    /// Builds a position after checking the bitboard invariants.
    pub fn new(size: BoardSize, mover: u64, opponent: u64) -> Result<Position> {
        if mover & opponent != 0 {
            return Err(Error::InvalidPosition("a square holds two discs".into()));
        }
        if (mover | opponent) & !size.board_mask() != 0 {
            return Err(Error::InvalidPosition(format!("discs outside the {size}x{size} board")));
        }
        Ok(Position { mover, opponent, size })
    }

    #[inline]
    pub const fn from_bits_unchecked(size: BoardSize, mover: u64, opponent: u64) -> Position {
        Position { mover, opponent, size }
    }

    #[inline]
    pub fn mover(&self) -> u64 {
        self.mover
    }

    #[inline]
    pub fn opponent(&self) -> u64 {
        self.opponent
    }

    #[inline]
    pub fn size(&self) -> BoardSize {
        self.size
    }

    #[inline]
    pub fn discs(&self) -> u32 {
        (self.mover | self.opponent).count_ones()
    }

    #[inline]
    pub fn empties(&self) -> u32 {
        self.size.squares() - self.discs()
    }

    #[inline]
    pub fn empty_mask(&self) -> u64 {
        !(self.mover | self.opponent) & self.size.board_mask()
    }

    #[inline]
    pub fn legal_moves(&self) -> u64 {
        self.size.legal_moves(self.mover, self.opponent)
    }

    #[inline]
    pub fn opponent_moves(&self) -> u64 {
        self.size.legal_moves(self.opponent, self.mover)
    }

    pub fn move_status(&self) -> MoveStatus {
        let moves = self.legal_moves();
        if moves != 0 {
            MoveStatus::HasMoves(MoveSet(moves))
        } else if self.opponent_moves() != 0 {
            MoveStatus::MustPass
        } else {
            MoveStatus::Terminal
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.legal_moves() == 0 && self.opponent_moves() == 0
    }

    /// Opponent discs flipped by a mover disc on `sq` (zero if illegal or occupied).
    #[inline]
    pub fn flips(&self, sq: Square) -> u64 {
        if (self.mover | self.opponent) & sq.bit() != 0 {
            return 0;
        }
        self.size.flips(self.mover, self.opponent, sq.index())
    }

    pub fn apply_move(&self, sq: Square) -> Result<Position> {
        let flipped = if sq.index() < self.size.squares() { self.flips(sq) } else { 0 };
        if flipped == 0 {
            return Err(Error::IllegalMove {
                square: format!("#{}", sq.0),
                position: self.notation(),
            });
        }
        Ok(self.with_flips(sq, flipped))
    }

    /// Applies a move already known to be legal.
    #[inline]
    pub fn play(&self, sq: Square) -> Position {
        let flipped = self.size.flips(self.mover, self.opponent, sq.index());
        debug_assert!(flipped != 0, "illegal move {sq:?}");
        self.with_flips(sq, flipped)
    }

    #[inline]
    fn with_flips(&self, sq: Square, flipped: u64) -> Position {
        Position {
            mover: self.opponent & !flipped,
            opponent: self.mover | flipped | sq.bit(),
            size: self.size,
        }
    }

    pub fn apply_pass(&self) -> Result<Position> {
        match self.move_status() {
            MoveStatus::MustPass => Ok(self.swapped()),
            MoveStatus::HasMoves(_) => Err(Error::Contract("pass while the mover has a legal move")),
            MoveStatus::Terminal => Err(Error::Contract("pass in a terminal position")),
        }
    }

    /// Exchanges the roles of the two players without touching the board.
    #[inline]
    pub fn swapped(&self) -> Position {
        Position { mover: self.opponent, opponent: self.mover, size: self.size }
    }

    pub fn final_score(&self) -> Result<Score> {
        if !self.is_terminal() {
            return Err(Error::Contract("final score of a non-terminal position"));
        }
        Ok(self.terminal_score())
    }

    /// Disc difference with the empty squares credited to the side ahead.
    #[inline]
    pub fn terminal_score(&self) -> Score {
        let own = self.mover.count_ones() as Score;
        let theirs = self.opponent.count_ones() as Score;
        let empties = self.size.squares() as Score - own - theirs;
        let diff = own - theirs;
        match diff.cmp(&0) {
            std::cmp::Ordering::Greater => diff + empties,
            std::cmp::Ordering::Less => diff - empties,
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn transform(&self, sym: Symmetry) -> Position {
        Position {
            mover: sym.map_bits(self.size, self.mover),
            opponent: sym.map_bits(self.size, self.opponent),
            size: self.size,
        }
    }

    pub fn canonicalize(&self) -> CanonicalKey {
        self.canonical_form().0
    }

    /// Canonical key plus a symmetry taking this position onto it.
    pub fn canonical_form(&self) -> (CanonicalKey, Symmetry) {
        let mut best = (CanonicalKey { mover: self.mover, opponent: self.opponent }, Symmetry::IDENTITY);
        for sym in Symmetry::all().skip(1) {
            let key = CanonicalKey {
                mover: sym.map_bits(self.size, self.mover),
                opponent: sym.map_bits(self.size, self.opponent),
            };
            if key < best.0 {
                best = (key, sym);
            }
        }
        best
    }

    /// `<size>:<mover-hex16>:<opponent-hex16>`
    pub fn notation(&self) -> String {
        format!("{}:{:016x}:{:016x}", self.size.edge(), self.mover, self.opponent)
    }

    pub fn parse_notation(text: &str) -> Result<Position> {
        let err = || Error::Parse { what: "position", input: text.to_string() };
        let mut parts = text.trim().split(':');
        let (Some(size), Some(mover), Some(opp), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(err());
        };
        let edge: u32 = size.parse().map_err(|_| err())?;
        let size = BoardSize::from_edge(edge).ok_or(Error::UnsupportedSize(edge))?;
        Position::new(size, parse_hex16(mover)?, parse_hex16(opp)?)
    }
}

/// Parses exactly sixteen hex digits.
pub fn parse_hex16(text: &str) -> Result<u64> {
    if text.len() != 16 {
        return Err(Error::Parse { what: "16-digit hex mask", input: text.to_string() });
    }
    u64::from_str_radix(text, 16).map_err(|_| Error::Parse { what: "16-digit hex mask", input: text.to_string() })
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Position({})", self.notation())
    }
}

/// Renders the board with `X` for the mover and `O` for the opponent.
impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edge = self.size.edge();
        write!(f, "  ")?;
        for c in 0..edge {
            write!(f, " {}", (b'a' + c as u8) as char)?;
        }
        writeln!(f)?;
        for r in 0..edge {
            write!(f, "{:2}", r + 1)?;
            for c in 0..edge {
                let bit = Square::from_coords(self.size, r, c).bit();
                let ch = if self.mover & bit != 0 {
                    'X'
                } else if self.opponent & bit != 0 {
                    'O'
                } else {
                    '.'
                };
                write!(f, " {ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
