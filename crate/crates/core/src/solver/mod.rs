//! Weak solving (plain PVS) and semi-strong solving (reopening search) of
//! Othello positions.

mod engine;
mod othello_domain;
mod table;

pub use engine::{Engine, EngineOptions, Expansion, MoveBuf, SearchDomain, SearchMode, SearchStats};
pub use othello_domain::{endgame_search, order_moves, MoveOrdering, OthelloDomain};
pub use table::{BoundTable, RecordTable};

use crate::error::{Error, Result};
use crate::kind::{KindFlags, NodeKind};
use crate::othello::{BoardSize, Position, Score, Square};
use crate::store::{SolutionDatabase, SolvedRecord};

/// Tunables shared by the weak and semi-strong solvers.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub ordering: MoveOrdering,
    /// Exact-kind nodes with at most this many empties are left to on-demand solving.
    pub endgame_empties: u32,
    /// Bound-only nodes with at most this many empties use the table-free endgame search.
    pub shortcut_empties: u32,
    pub table_min_empties: u32,
    pub table_log2: u32,
    pub use_table: bool,
    pub record_limit: Option<usize>,
}

impl SolverConfig {
    pub fn for_size(size: BoardSize) -> SolverConfig {
        match size {
            BoardSize::Four => SolverConfig {
                ordering: MoveOrdering::Heuristic,
                endgame_empties: 0,
                shortcut_empties: 0,
                table_min_empties: 0,
                table_log2: 16,
                use_table: true,
                record_limit: None,
            },
            BoardSize::Six => SolverConfig {
                ordering: MoveOrdering::Heuristic,
                endgame_empties: 10,
                shortcut_empties: 8,
                table_min_empties: 8,
                table_log2: 22,
                use_table: true,
                record_limit: None,
            },
        }
    }

    /// Configuration that visits every node through the general search loop
    /// (no shortcut, tables at every depth); used for node censuses.
    pub fn exhaustive_accounting(size: BoardSize, ordering: MoveOrdering) -> SolverConfig {
        SolverConfig {
            ordering,
            endgame_empties: 0,
            shortcut_empties: 0,
            table_min_empties: 0,
            ..SolverConfig::for_size(size)
        }
    }

    pub fn engine(&self, size: BoardSize, mode: SearchMode) -> Engine<OthelloDomain> {
        let mut domain = OthelloDomain::new(size, self.ordering.clone());
        domain.endgame_empties = self.endgame_empties;
        domain.shortcut_empties = self.shortcut_empties;
        domain.table_min_empties = self.table_min_empties;
        Engine::new(
            domain,
            EngineOptions {
                mode,
                use_table: self.use_table,
                table_log2: self.table_log2,
                record_limit: self.record_limit,
            },
        )
    }
}

/// One ply of a principal variation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PvMove {
    Move(Square),
    Pass,
}

impl PvMove {
    pub fn name(self, size: BoardSize) -> String {
        match self {
            PvMove::Move(sq) => sq.name(size),
            PvMove::Pass => "ps".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WeakSolution {
    pub value: Score,
    pub pv: Vec<PvMove>,
    pub stats: SearchStats,
}

/// Exact value of `p` and a move attaining it (`None` for pass or terminal).
pub fn solve_exact(engine: &mut Engine<OthelloDomain>, p: &Position) -> (Score, Option<Square>) {
    let value = engine.solve(p, NodeKind::P);
    (value, engine.root_best_move().map(Square))
}

/// Solves `p` with fail-soft PVS (no reopening) and extracts a principal variation.
pub fn weak_solve(p: &Position, config: &SolverConfig) -> WeakSolution {
    let mut engine = config.engine(p.size(), SearchMode::AlphaBeta);
    let (value, _) = solve_exact(&mut engine, p);
    let stats = engine.stats.clone();
    let mut pv = Vec::new();
    let mut cur = *p;
    let mut expect = value;
    loop {
        let legal = cur.legal_moves();
        if legal == 0 {
            if cur.opponent_moves() == 0 {
                debug_assert_eq!(cur.terminal_score(), expect);
                break;
            }
            pv.push(PvMove::Pass);
            cur = cur.swapped();
            expect = -expect;
            continue;
        }
        let (v, mv) = solve_exact(&mut engine, &cur);
        debug_assert_eq!(v, expect);
        let mv = mv.expect("a position with moves has a best move");
        pv.push(PvMove::Move(mv));
        cur = cur.play(mv);
        expect = -v;
    }
    WeakSolution { value, pv, stats }
}

#[derive(Debug)]
pub struct SemiStrongSolution {
    pub value: Score,
    pub database: SolutionDatabase,
    pub stats: SearchStats,
}

/// Runs the reopening search from `root` as a P node and collects every
/// P/A'/P' node into a solution database.
pub fn semi_strong_solve(root: &Position, config: &SolverConfig) -> Result<SemiStrongSolution> {
    let mut engine = config.engine(root.size(), SearchMode::Reopening);
    let value = engine.solve(root, NodeKind::P);
    let (_, records, stats, error) = engine.into_parts();
    let database = database_from_records(root.size(), config.endgame_empties, &records)?;
    if let Some(e) = error {
        return Err(e);
    }
    Ok(SemiStrongSolution { value, database, stats })
}

pub(crate) fn database_from_records(
    size: BoardSize,
    endgame_empties: u32,
    records: &RecordTable<crate::CanonicalKey>,
) -> Result<SolutionDatabase> {
    let mut out: Vec<SolvedRecord> = records
        .iter()
        .map(|(key, flags)| SolvedRecord {
            key: *key,
            value: flags.lower as i16,
            best_move: flags.best_move.unwrap_or(SolvedRecord::NO_MOVE),
            kinds: flags.bits & KindFlags::EXACT_MASK,
        })
        .collect();
    out.sort_unstable_by_key(|r| r.key);
    if endgame_empties > u8::MAX as u32 {
        return Err(Error::Config("endgame threshold does not fit the store header".into()));
    }
    SolutionDatabase::new(size, endgame_empties as u8, out)
}
