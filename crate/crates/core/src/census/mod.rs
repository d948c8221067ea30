//! Unique-position censuses by disc count: positions expanded by the weak
//! and semi-strong searches, and every reachable position by breadth-first
//! enumeration.

mod exhaustive;
mod table;

pub use exhaustive::{census_exhaustive, ExhaustiveOptions, ExhaustiveRun};
pub use table::{CensusColumn, CensusTable};

use std::collections::BTreeMap;

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::kind::NodeKind;
use crate::othello::{CanonicalKey, Position, Score};
use crate::solver::{MoveOrdering, SearchMode, SearchStats, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CensusAlgo {
    AlphaBeta,
    Reopening,
    Exhaustive,
}

impl CensusAlgo {
    pub fn parse(text: &str) -> Option<CensusAlgo> {
        match text {
            "ab" | "alphabeta" => Some(CensusAlgo::AlphaBeta),
            "reab" | "reopening" => Some(CensusAlgo::Reopening),
            "exhaustive" => Some(CensusAlgo::Exhaustive),
            _ => None,
        }
    }

    pub fn column(self) -> CensusColumn {
        match self {
            CensusAlgo::AlphaBeta => CensusColumn::AlphaBeta,
            CensusAlgo::Reopening => CensusColumn::Reopening,
            CensusAlgo::Exhaustive => CensusColumn::Exhaustive,
        }
    }
}

/// Canonical keys of expanded positions, bucketed by disc count.
#[derive(Clone, Debug, Default)]
pub struct KeyCensus {
    levels: BTreeMap<u32, FxHashSet<CanonicalKey>>,
    len: usize,
    limit: Option<usize>,
    /// Smallest disc count at which a new key was refused for lack of room.
    refused_from: Option<u32>,
}

impl KeyCensus {
    pub fn new(limit: Option<usize>) -> KeyCensus {
        KeyCensus { limit, ..KeyCensus::default() }
    }

    pub fn insert(&mut self, p: &Position) {
        let key = p.canonicalize();
        let discs = p.discs();
        let full = self.limit.is_some_and(|l| self.len >= l);
        let level = self.levels.entry(discs).or_default();
        if level.contains(&key) {
            return;
        }
        if full {
            self.refused_from = Some(self.refused_from.map_or(discs, |d| d.min(discs)));
            return;
        }
        level.insert(key);
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn counts(&self) -> BTreeMap<u32, u64> {
        self.levels.iter().filter(|(_, s)| !s.is_empty()).map(|(&d, s)| (d, s.len() as u64)).collect()
    }

    pub fn refused_from(&self) -> Option<u32> {
        self.refused_from
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CensusOptions {
    /// Consult transposition tables (records are kept either way).
    pub use_table: bool,
    /// Also count nodes answered from the table without expansion.
    pub count_table_hits: bool,
    pub key_limit: Option<usize>,
}

impl Default for CensusOptions {
    fn default() -> CensusOptions {
        CensusOptions { use_table: true, count_table_hits: false, key_limit: None }
    }
}

#[derive(Clone, Debug)]
pub struct SearchCensus {
    pub value: Score,
    pub counts: BTreeMap<u32, u64>,
    pub stats: SearchStats,
}

impl SearchCensus {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Runs the weak (`AlphaBeta`) or semi-strong (`Reopening`) search from
/// `root` through the general search loop and collects every expanded
/// position's canonical key.
pub fn census_search(
    algo: CensusAlgo,
    root: &Position,
    ordering: MoveOrdering,
    options: CensusOptions,
) -> Result<SearchCensus> {
    let mode = match algo {
        CensusAlgo::AlphaBeta => SearchMode::AlphaBeta,
        CensusAlgo::Reopening => SearchMode::Reopening,
        CensusAlgo::Exhaustive => return Err(Error::Config("census_search runs a search algorithm".into())),
    };
    let mut config = SolverConfig::exhaustive_accounting(root.size(), ordering);
    config.use_table = options.use_table;
    let mut engine = config.engine(root.size(), mode);
    engine.domain.census = Some(KeyCensus::new(options.key_limit));
    engine.domain.census_table_hits = options.count_table_hits;
    let value = engine.solve(root, NodeKind::P);
    let census = engine.domain.census.take().expect("census installed above");
    if let Some(e) = engine.take_error() {
        return Err(e);
    }
    if let Some(refused) = census.refused_from() {
        return Err(Error::CensusCapacity { first: root.discs(), last: refused.saturating_sub(1) });
    }
    Ok(SearchCensus { value, counts: census.counts(), stats: engine.stats.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::othello::BoardSize;

    #[test]
    fn key_census_deduplicates_symmetric_positions() {
        let root = Position::initial(BoardSize::Six);
        let mut c = KeyCensus::new(None);
        for m in crate::MoveSet(root.legal_moves()) {
            c.insert(&root.play(m));
        }
        assert_eq!(c.counts(), BTreeMap::from([(5, 1)]));
    }

    #[test]
    fn key_limit_reports_complete_rows() {
        let root = Position::initial(BoardSize::Four);
        let options = CensusOptions { key_limit: Some(20), ..CensusOptions::default() };
        match census_search(CensusAlgo::Reopening, &root, MoveOrdering::Heuristic, options) {
            Err(Error::CensusCapacity { first, last }) => assert!(first == 4 && last >= 4),
            other => panic!("expected a capacity failure, got {other:?}"),
        }
    }

    #[test]
    fn search_census_is_deterministic() {
        let root = Position::initial(BoardSize::Four);
        let a = census_search(CensusAlgo::Reopening, &root, MoveOrdering::Heuristic, CensusOptions::default()).unwrap();
        let b = census_search(CensusAlgo::Reopening, &root, MoveOrdering::Heuristic, CensusOptions::default()).unwrap();
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.counts.get(&4), Some(&1));
    }
}
