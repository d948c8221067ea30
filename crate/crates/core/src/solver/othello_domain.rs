use std::sync::Arc;

use smallvec::SmallVec;

use super::engine::{Expansion, MoveBuf, SearchDomain};
use crate::census::KeyCensus;
use crate::kind::{NodeKind, SearchWindow};
use crate::oracle::OracleDb;
use crate::othello::{BoardSize, CanonicalKey, MoveSet, Position, Score, Square, Symmetry};

/// How moves are sorted before iterating.
#[derive(Clone)]
pub enum MoveOrdering {
    /// Table move first, then (from 14 empties up) a shallow search over a
    /// mobility/corner evaluation, otherwise fewest replies for the
    /// opponent; ties by square index.
    Heuristic,
    /// A child of maximal true value first, ties by ascending square index.
    Oracle(Arc<OracleDb>),
    /// Ascending square index.
    Natural,
}

impl std::fmt::Debug for MoveOrdering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MoveOrdering::Heuristic => "heuristic",
            MoveOrdering::Oracle(_) => "oracle",
            MoveOrdering::Natural => "natural",
        })
    }
}

/// Sorts `moves` of `p` in place.
pub fn order_moves(p: &Position, moves: &mut [u8], ordering: &MoveOrdering, hint: Option<u8>) {
    if moves.len() <= 1 {
        return;
    }
    match ordering {
        MoveOrdering::Natural => moves.sort_unstable(),
        MoveOrdering::Heuristic => {
            let depth = shallow_depth(p.empties());
            if depth == 0 {
                moves.sort_by_cached_key(|&m| {
                    let replies = p.play(Square(m)).legal_moves().count_ones();
                    (Some(m) != hint, replies, m)
                });
            } else {
                moves.sort_by_cached_key(|&m| {
                    let child = p.play(Square(m));
                    (Some(m) != hint, shallow(&child, depth - 1, -EVAL_INF, EVAL_INF), m)
                });
            }
        }
        MoveOrdering::Oracle(db) => {
            moves.sort_by_cached_key(|&m| {
                let child = p.play(Square(m));
                let v = db.value(&child).unwrap_or_else(|| {
                    panic!("oracle has no value for {} (built from a different root?)", child.notation())
                });
                // ascending child value == descending value for the mover
                (v, m)
            });
        }
    }
}

/// Depth of the ordering search at a node with `empties` empty squares
/// (0: order by opponent mobility alone).
fn shallow_depth(empties: u32) -> u32 {
    match empties {
        20.. => 4,
        14.. => 3,
        _ => 0,
    }
}

const EVAL_INF: i32 = 1 << 20;

/// Static evaluation for the side to move: mobility, corners and frontier.
fn evaluate(p: &Position) -> i32 {
    let size = p.size();
    let own = p.legal_moves().count_ones() as i32;
    let theirs = p.opponent_moves().count_ones() as i32;
    let corners = corner_mask(size);
    let corner = (p.mover() & corners).count_ones() as i32 - (p.opponent() & corners).count_ones() as i32;
    let empty = p.empty_mask();
    let near_empty = size.neighbours(empty);
    let frontier = (p.opponent() & near_empty).count_ones() as i32 - (p.mover() & near_empty).count_ones() as i32;
    8 * (own - theirs) + 40 * corner + 2 * frontier
}

fn corner_mask(size: BoardSize) -> u64 {
    let n = size.edge();
    1 | 1 << (n - 1) | 1 << (n * (n - 1)) | 1 << (n * n - 1)
}

/// Depth-limited negamax over [`evaluate`]; terminal positions score far beyond any evaluation.
fn shallow(p: &Position, depth: u32, alpha: i32, beta: i32) -> i32 {
    let legal = p.legal_moves();
    if legal == 0 {
        if p.opponent_moves() == 0 {
            return p.terminal_score() * 1000;
        }
        if depth == 0 {
            return evaluate(p);
        }
        return -shallow(&p.swapped(), depth - 1, -beta, -alpha);
    }
    if depth == 0 {
        return evaluate(p);
    }
    let mut best = -EVAL_INF;
    let mut a = alpha;
    for sq in MoveSet(legal) {
        let v = -shallow(&p.play(sq), depth - 1, -beta, -a);
        if v > best {
            best = v;
            if best >= beta {
                break;
            }
            a = a.max(best);
        }
    }
    best
}

pub struct OthelloDomain {
    pub ordering: MoveOrdering,
    /// Exact-kind nodes with at most this many empties are not recorded.
    pub endgame_empties: u32,
    /// Bound-only nodes with at most this many empties go to [`endgame_search`].
    pub shortcut_empties: u32,
    /// Tables are consulted only above this many empties.
    pub table_min_empties: u32,
    pub census: Option<KeyCensus>,
    /// Also count nodes answered by the table in the census.
    pub census_table_hits: bool,
    size: BoardSize,
}

impl OthelloDomain {
    pub fn new(size: BoardSize, ordering: MoveOrdering) -> OthelloDomain {
        OthelloDomain {
            ordering,
            endgame_empties: 0,
            shortcut_empties: 0,
            table_min_empties: 0,
            census: None,
            census_table_hits: false,
            size,
        }
    }
}

impl SearchDomain for OthelloDomain {
    type Node = Position;
    type Key = CanonicalKey;
    type Frame = Symmetry;

    fn infinity(&self) -> Score {
        self.size.squares() as Score + 1
    }

    #[inline]
    fn expand(&mut self, p: &Position, moves: &mut MoveBuf) -> Expansion {
        let legal = p.legal_moves();
        if legal == 0 {
            return if p.opponent_moves() == 0 { Expansion::Terminal(p.terminal_score()) } else { Expansion::Pass };
        }
        moves.extend(MoveSet(legal).iter().map(|s| s.0));
        Expansion::Moves
    }

    #[inline]
    fn play(&self, p: &Position, mv: u8) -> Position {
        p.play(Square(mv))
    }

    #[inline]
    fn pass(&self, p: &Position) -> Position {
        p.swapped()
    }

    #[inline]
    fn key(&self, p: &Position, required: bool) -> Option<(CanonicalKey, Symmetry)> {
        (required || p.empties() > self.table_min_empties).then(|| p.canonical_form())
    }

    fn move_to_key_frame(&self, mv: u8, frame: Symmetry) -> u8 {
        frame.map_square(self.size, mv)
    }

    fn move_from_key_frame(&self, mv: u8, frame: Symmetry) -> u8 {
        frame.inverse().map_square(self.size, mv)
    }

    fn weight(&self, p: &Position) -> u8 {
        p.empties() as u8
    }

    fn order(&mut self, p: &Position, moves: &mut MoveBuf, hint: Option<u8>) {
        order_moves(p, moves, &self.ordering, hint);
    }

    fn records(&self, p: &Position) -> bool {
        p.empties() > self.endgame_empties
    }

    fn on_expand(&mut self, p: &Position) {
        if let Some(c) = self.census.as_mut() {
            c.insert(p);
        }
    }

    fn on_table_hit(&mut self, p: &Position) {
        if self.census_table_hits {
            self.on_expand(p);
        }
    }

    fn shortcut(&mut self, p: &Position, window: SearchWindow) -> Option<Score> {
        (p.empties() <= self.shortcut_empties).then(|| endgame_search(p, window.alpha, window.beta))
    }

    fn trace_record(&self, key: &CanonicalKey, kind: NodeKind, value: Score, best: Option<u8>) {
        if log::log_enabled!(log::Level::Trace) {
            let mv = best.map_or_else(|| "ps".to_string(), |m| Square(m).name(self.size));
            log::trace!("{key} {kind} {value} {mv}");
        }
    }
}

/// Empties above which [`endgame_search`] sorts moves fastest-first.
const SORTED_ABOVE: u32 = 5;

/// Fail-soft alpha-beta without tables for small endgames.
pub fn endgame_search(p: &Position, alpha: Score, beta: Score) -> Score {
    let empties = p.empties();
    if empties > SORTED_ABOVE {
        return sorted_search(p, alpha, beta);
    }
    let quadrants = quadrants(p.size());
    small_search(p, alpha, beta, empties, &quadrants)
}

fn sorted_search(p: &Position, alpha: Score, beta: Score) -> Score {
    let legal = p.legal_moves();
    if legal == 0 {
        if p.opponent_moves() == 0 {
            return p.terminal_score();
        }
        return -endgame_search(&p.swapped(), -beta, -alpha);
    }
    let mut children: SmallVec<[(u32, Position); 16]> = MoveSet(legal)
        .iter()
        .map(|sq| {
            let child = p.play(sq);
            (child.legal_moves().count_ones(), child)
        })
        .collect();
    children.sort_unstable_by_key(|c| c.0);
    let mut best = -(p.size().squares() as Score) - 1;
    let mut a = alpha;
    for (_, child) in children {
        let v = -endgame_search(&child, -beta, -a);
        if v > best {
            best = v;
            if best >= beta {
                break;
            }
            a = a.max(best);
        }
    }
    best
}

/// Board quarters, for parity ordering.
fn quadrants(size: BoardSize) -> [u64; 4] {
    let n = size.edge();
    let h = n / 2;
    let mut q = [0u64; 4];
    for r in 0..n {
        for c in 0..n {
            q[((r >= h) as usize) * 2 + (c >= h) as usize] |= 1u64 << (r * n + c);
        }
    }
    q
}

/// Tries empty squares directly (no move generation), odd-parity quarters first.
fn small_search(p: &Position, alpha: Score, beta: Score, empties: u32, quadrants: &[u64; 4]) -> Score {
    if empties == 1 {
        return last_square(p);
    }
    let empty = p.empty_mask();
    let mut odd = 0;
    for q in quadrants {
        if (empty & q).count_ones() & 1 == 1 {
            odd |= q;
        }
    }
    let mut best = -(p.size().squares() as Score) - 1;
    let mut a = alpha;
    let mut moved = false;
    for part in [empty & odd, empty & !odd] {
        for sq in MoveSet(part) {
            let flipped = p.flips(sq);
            if flipped == 0 {
                continue;
            }
            moved = true;
            let child = Position::from_bits_unchecked(p.size(), p.opponent() & !flipped, p.mover() | flipped | sq.bit());
            let v = -small_search(&child, -beta, -a, empties - 1, quadrants);
            if v > best {
                best = v;
                if best >= beta {
                    return best;
                }
                a = a.max(best);
            }
        }
    }
    if moved {
        return best;
    }
    if p.opponent_moves() == 0 {
        return p.terminal_score();
    }
    -small_search(&p.swapped(), -beta, -alpha, empties, quadrants)
}

/// Exact value with a single empty square.
fn last_square(p: &Position) -> Score {
    let sq = Square(p.empty_mask().trailing_zeros() as u8);
    if p.flips(sq) != 0 {
        return p.play(sq).swapped().terminal_score();
    }
    let q = p.swapped();
    if q.flips(sq) != 0 {
        return -q.play(sq).swapped().terminal_score();
    }
    p.terminal_score()
}
