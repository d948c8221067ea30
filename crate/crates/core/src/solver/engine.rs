//! Kind-aware principal variation search over an abstract game.
//!
//! In [`SearchMode::Reopening`] every P, A' and P' node resets its window to
//! `(-inf, +inf)` before iterating, so it returns an exact value and a best
//! move, which are recorded. [`SearchMode::AlphaBeta`] is the same loop
//! without reopening: plain fail-soft PVS.

use std::hash::Hash;

use smallvec::SmallVec;

use super::table::{BoundTable, RecordTable};
use crate::error::Error;
use crate::kind::{child_kind, tt_admissible, NodeKind, SearchWindow};
use crate::othello::Score;

pub type MoveBuf = SmallVec<[u8; 32]>;

pub enum Expansion {
    Terminal(Score),
    Pass,
    Moves,
}

/// A game as seen by the search.
pub trait SearchDomain {
    type Node: Copy;
    type Key: Copy + Eq + Hash;
    /// Orientation of a node relative to its key (moves are stored in the key's frame).
    type Frame: Copy;

    /// Sentinel one past the largest attainable score.
    fn infinity(&self) -> Score;

    /// Classifies the node; for `Moves`, fills `moves`.
    fn expand(&mut self, node: &Self::Node, moves: &mut MoveBuf) -> Expansion;

    fn play(&self, node: &Self::Node, mv: u8) -> Self::Node;

    fn pass(&self, node: &Self::Node) -> Self::Node;

    /// Table key. `None` disables table use at this node unless `required`.
    fn key(&self, node: &Self::Node, required: bool) -> Option<(Self::Key, Self::Frame)>;

    fn move_to_key_frame(&self, mv: u8, frame: Self::Frame) -> u8;

    fn move_from_key_frame(&self, mv: u8, frame: Self::Frame) -> u8;

    /// Replacement priority of a table entry for this node.
    fn weight(&self, _node: &Self::Node) -> u8 {
        0
    }

    /// Sorts `moves` most promising first. `hint` is a table move in the node's frame.
    fn order(&mut self, node: &Self::Node, moves: &mut MoveBuf, hint: Option<u8>);

    /// Whether exact-kind nodes here are solved and recorded, or left to
    /// on-demand solving.
    fn records(&self, _node: &Self::Node) -> bool {
        true
    }

    /// Called for every node whose move list is iterated.
    fn on_expand(&mut self, _node: &Self::Node) {}

    /// Called when a table entry answers a node that has moves.
    fn on_table_hit(&mut self, _node: &Self::Node) {}

    /// A fail-soft answer for a bound-only node without going through the
    /// general loop (small endgames).
    fn shortcut(&mut self, _node: &Self::Node, _window: SearchWindow) -> Option<Score> {
        None
    }

    fn trace_record(&self, _key: &Self::Key, _kind: NodeKind, _value: Score, _best: Option<u8>) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Reopening,
    AlphaBeta,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// `visits[ply - 1][kind]`: calls of the search on a node of that kind.
    pub visits: Vec<[u64; 5]>,
    /// Null-window results that landed strictly inside the window and forced a re-search.
    pub researches: u64,
    pub table_hits: u64,
    /// Nodes whose move lists were iterated.
    pub expansions: u64,
}

impl SearchStats {
    #[inline]
    fn visit(&mut self, kind: NodeKind, ply: usize) {
        if self.visits.len() < ply {
            self.visits.resize(ply, [0; 5]);
        }
        self.visits[ply - 1][kind.index()] += 1;
    }

    pub fn total_visits(&self) -> u64 {
        self.visits.iter().flatten().sum()
    }

    pub fn visits_of(&self, kind: NodeKind) -> u64 {
        self.visits.iter().map(|v| v[kind.index()]).sum()
    }
}

pub struct EngineOptions {
    pub mode: SearchMode,
    /// Consult the tables before searching; records are kept regardless.
    pub use_table: bool,
    pub table_log2: u32,
    pub record_limit: Option<usize>,
}

pub struct Engine<D: SearchDomain> {
    pub domain: D,
    mode: SearchMode,
    use_table: bool,
    inf: Score,
    bounds: BoundTable<D::Key>,
    records: RecordTable<D::Key>,
    pub stats: SearchStats,
    root_best: Option<u8>,
    error: Option<Error>,
}

impl<D: SearchDomain> Engine<D> {
    pub fn new(domain: D, options: EngineOptions) -> Engine<D> {
        let inf = domain.infinity();
        let table_log2 = if options.use_table { options.table_log2 } else { 1 };
        Engine {
            domain,
            mode: options.mode,
            use_table: options.use_table,
            inf,
            bounds: BoundTable::new(table_log2, inf),
            records: RecordTable::new(options.record_limit),
            stats: SearchStats::default(),
            root_best: None,
            error: None,
        }
    }

    pub fn mode(&self) -> SearchMode {
        self.mode
    }

    pub fn infinity(&self) -> Score {
        self.inf
    }

    pub fn records(&self) -> &RecordTable<D::Key> {
        &self.records
    }

    pub fn into_parts(self) -> (D, RecordTable<D::Key>, SearchStats, Option<Error>) {
        (self.domain, self.records, self.stats, self.error)
    }

    /// First failure (record capacity) hit during searching, if any. Values
    /// returned by the search remain correct; only records went missing.
    pub fn take_error(&mut self) -> Option<Error> {
        self.error.take()
    }

    /// Best move of the most recent root search, in the root's frame
    /// (`None` for a pass or terminal root).
    pub fn root_best_move(&self) -> Option<u8> {
        self.root_best
    }

    /// Searches `root` as a node of kind `kind` with a full window.
    pub fn solve(&mut self, root: &D::Node, kind: NodeKind) -> Score {
        self.search_root(root, SearchWindow::full(self.inf), kind)
    }

    pub fn search_root(&mut self, root: &D::Node, window: SearchWindow, kind: NodeKind) -> Score {
        self.root_best = None;
        self.search(root, window, kind, 1)
    }

    fn search(&mut self, node: &D::Node, window: SearchWindow, kind: NodeKind, ply: usize) -> Score {
        self.stats.visit(kind, ply);
        let inf = self.inf;
        let mut kind = kind;
        let mut window = window;
        let mut exact = self.mode == SearchMode::Reopening && kind.is_exact();
        if exact {
            // P' is reopened too: an A' re-search hands its P' child the
            // window (-inf, -score), and a cutoff there would leave human
            // replies unsolved.
            window = SearchWindow::full(inf);
            if !self.domain.records(node) {
                exact = false;
                kind = NodeKind::C;
            }
        }
        if !exact && ply > 1 {
            if let Some(v) = self.domain.shortcut(node, window) {
                return v;
            }
        }

        let mut moves = MoveBuf::new();
        let expansion = self.domain.expand(node, &mut moves);
        if let Expansion::Terminal(score) = expansion {
            return score;
        }

        let keyed = if self.use_table || exact { self.domain.key(node, exact) } else { None };
        let mut hint = None;
        if let (Some((key, frame)), true) = (keyed, self.use_table) {
            // the root always iterates (no shortcut either) so that it reports a best move
            let hit = if ply > 1 { self.probe(&key, kind, exact, window) } else { None };
            if let Some(hit) = hit {
                self.stats.table_hits += 1;
                if matches!(expansion, Expansion::Moves) {
                    self.domain.on_table_hit(node);
                }
                return hit;
            }
            hint = self.hint(&key, exact).map(|m| self.domain.move_from_key_frame(m, frame));
        }

        let (best, best_move) = match expansion {
            Expansion::Pass => {
                let child = self.domain.pass(node);
                let v = -self.search(&child, window.negate(), child_kind(kind, true), ply + 1);
                (v, None)
            }
            _ => {
                self.stats.expansions += 1;
                self.domain.on_expand(node);
                self.domain.order(node, &mut moves, hint);
                self.iterate(node, &moves, window, kind, ply)
            }
        };
        if ply == 1 {
            self.root_best = best_move;
        }

        if let Some((key, frame)) = keyed {
            let stored_move = best_move.map(|m| self.domain.move_to_key_frame(m, frame));
            if exact {
                self.domain.trace_record(&key, kind, best, stored_move);
                if let Err(e) = self.records.merge(key, kind, best, stored_move) {
                    self.error.get_or_insert(e);
                }
            } else if self.use_table {
                let weight = self.domain.weight(node);
                self.bounds.store(key, weight, window, best, stored_move);
            }
        }
        best
    }

    fn iterate(
        &mut self,
        node: &D::Node,
        moves: &MoveBuf,
        window: SearchWindow,
        kind: NodeKind,
        ply: usize,
    ) -> (Score, Option<u8>) {
        let beta = window.beta;
        let mut alpha = window.alpha;
        let mut best = -self.inf;
        let mut best_move = None;
        for (i, &mv) in moves.iter().enumerate() {
            let child = self.domain.play(node, mv);
            let score = if i == 0 {
                -self.search(&child, SearchWindow::new(-beta, -alpha), child_kind(kind, true), ply + 1)
            } else {
                let mut s = -self.search(&child, SearchWindow::null(-alpha - 1), child_kind(kind, false), ply + 1);
                if alpha < s && s < beta {
                    self.stats.researches += 1;
                    alpha = s;
                    s = -self.search(&child, SearchWindow::new(-beta, -alpha), child_kind(kind, true), ply + 1);
                }
                s
            };
            if score > best {
                best = score;
                best_move = Some(mv);
            }
            alpha = alpha.max(best);
            if alpha >= beta {
                break;
            }
        }
        (best, best_move)
    }

    fn probe(&self, key: &D::Key, kind: NodeKind, exact: bool, window: SearchWindow) -> Option<Score> {
        if self.mode == SearchMode::Reopening {
            if let Some(f) = self.records.get(key) {
                if tt_admissible(kind, f, window) {
                    return Some(f.lower);
                }
            }
        }
        if exact {
            return None;
        }
        let f = self.bounds.probe(key)?;
        // without reopening the kinds carry no obligations: any answering bound will do
        let kind = if self.mode == SearchMode::AlphaBeta { NodeKind::C } else { kind };
        if !tt_admissible(kind, &f, window) {
            return None;
        }
        Some(if f.lower >= window.beta {
            f.lower
        } else if f.upper <= window.alpha {
            f.upper
        } else {
            f.lower
        })
    }

    fn hint(&self, key: &D::Key, exact: bool) -> Option<u8> {
        if exact {
            if let Some(m) = self.records.get(key).and_then(|f| f.best_move) {
                return Some(m);
            }
        }
        self.bounds.probe(key).and_then(|f| f.best_move)
    }
}
