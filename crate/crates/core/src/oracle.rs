//! Brute-force ground truth: memoized negamax over every position reachable
//! from a root, the AI-reachable closure of a solution database, and
//! verification of a database against both.

use std::fmt::Write as _;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::othello::{CanonicalKey, MoveSet, Position, Score, Square};
use crate::store::{solve_on_demand, SolutionDatabase, SolvedRecord};

/// Order in which [`OracleDb::solve_all`] visits children. Both give the same
/// table; running both is a cheap self-check of the memoization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Traversal {
    Ascending,
    Descending,
}

/// Exact value of every position reachable from a root, keyed canonically.
#[derive(Clone, Debug)]
pub struct OracleDb {
    root: Position,
    values: FxHashMap<CanonicalKey, i8>,
}

impl OracleDb {
    /// Solves every position reachable from `root`. Fails if more than
    /// `capacity` distinct positions are met.
    pub fn solve_all(root: &Position, order: Traversal, capacity: Option<usize>) -> Result<OracleDb> {
        let mut solver = Negamax { values: FxHashMap::default(), order, capacity };
        solver.value(root)?;
        Ok(OracleDb { root: *root, values: solver.values })
    }

    pub fn root(&self) -> &Position {
        &self.root
    }

    pub fn root_value(&self) -> Score {
        self.value(&self.root).expect("root is always solved")
    }

    pub fn value(&self, p: &Position) -> Option<Score> {
        self.values.get(&p.canonicalize()).map(|&v| v as Score)
    }

    pub fn value_of_key(&self, key: &CanonicalKey) -> Option<Score> {
        self.values.get(key).map(|&v| v as Score)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (CanonicalKey, Score)> + '_ {
        self.values.iter().map(|(k, &v)| (*k, v as Score))
    }

    /// Keys whose stored value differs from the negamax of their children.
    pub fn inconsistencies(&self) -> Vec<CanonicalKey> {
        let size = self.root.size();
        let mut bad: Vec<CanonicalKey> = self
            .values
            .iter()
            .filter(|(key, &v)| {
                let p = key.to_position(size);
                let expect = if p.legal_moves() != 0 {
                    MoveSet(p.legal_moves()).iter().map(|m| self.value(&p.play(m)).map(|c| -c)).max().flatten()
                } else if p.opponent_moves() != 0 {
                    self.value(&p.swapped()).map(|c| -c)
                } else {
                    Some(p.terminal_score())
                };
                expect != Some(v as Score)
            })
            .map(|(k, _)| *k)
            .collect();
        bad.sort_unstable();
        bad
    }
}

struct Negamax {
    values: FxHashMap<CanonicalKey, i8>,
    order: Traversal,
    capacity: Option<usize>,
}

impl Negamax {
    fn value(&mut self, p: &Position) -> Result<Score> {
        let key = p.canonicalize();
        if let Some(&v) = self.values.get(&key) {
            return Ok(v as Score);
        }
        let legal = p.legal_moves();
        let v = if legal != 0 {
            let mut moves: Vec<Square> = MoveSet(legal).iter().collect();
            if self.order == Traversal::Descending {
                moves.reverse();
            }
            let mut best = Score::MIN;
            for m in moves {
                best = best.max(-self.value(&p.play(m))?);
            }
            best
        } else if p.opponent_moves() != 0 {
            -self.value(&p.swapped())?
        } else {
            p.terminal_score()
        };
        if let Some(limit) = self.capacity {
            if self.values.len() >= limit {
                return Err(Error::Capacity { what: "oracle table", limit });
            }
        }
        self.values.insert(key, v as i8);
        Ok(v)
    }
}

/// Which side the AI plays in an AI-reachable closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// The AI moves at the root.
    AiFirst,
    /// The human moves at the root.
    AiSecond,
    Union,
}

/// Positions reachable when the AI follows the database's designated moves
/// and the human plays anything. Positions with at most E empties are
/// included but not expanded: from there on the AI solves on demand.
#[derive(Clone, Debug, Default)]
pub struct ReachableSet {
    /// Canonical key -> bit 0 if reached with the AI to move, bit 1 with the human to move.
    pub turns: FxHashMap<CanonicalKey, u8>,
    /// AI-to-move positions above the threshold with no record: the closure stops there.
    pub missing: Vec<CanonicalKey>,
}

pub const AI_TO_MOVE: u8 = 1;
pub const HUMAN_TO_MOVE: u8 = 2;

impl ReachableSet {
    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    pub fn contains(&self, key: &CanonicalKey) -> bool {
        self.turns.contains_key(key)
    }

    pub fn keys(&self) -> FxHashSet<CanonicalKey> {
        self.turns.keys().copied().collect()
    }
}

/// The AI-reachable closure; errors if an AI-to-move position has no designated move.
pub fn ai_reachable_set(db: &SolutionDatabase, root: &Position, scenario: Scenario) -> Result<ReachableSet> {
    let set = reachable_closure(db, root, scenario, None);
    match set.missing.first() {
        None => Ok(set),
        Some(first) => Err(Error::InvalidRecords(format!(
            "{} AI-to-move positions have no designated move, first {first}",
            set.missing.len()
        ))),
    }
}

/// The closure, collecting rather than failing on missing records, and
/// optionally limited to `max_plies` moves (passes included) from the root.
pub fn reachable_closure(
    db: &SolutionDatabase,
    root: &Position,
    scenario: Scenario,
    max_plies: Option<u32>,
) -> ReachableSet {
    let mut set = ReachableSet::default();
    let starts: &[bool] = match scenario {
        Scenario::AiFirst => &[true],
        Scenario::AiSecond => &[false],
        Scenario::Union => &[true, false],
    };
    let mut missing = FxHashSet::default();
    let mut stack: Vec<(Position, bool, u32)> = starts.iter().map(|&ai| (*root, ai, 0)).collect();
    while let Some((p, ai, ply)) = stack.pop() {
        let key = p.canonicalize();
        let bit = if ai { AI_TO_MOVE } else { HUMAN_TO_MOVE };
        let seen = set.turns.entry(key).or_insert(0);
        if *seen & bit != 0 {
            continue;
        }
        *seen |= bit;
        if p.is_terminal() || p.empties() <= db.endgame_empties() || max_plies.is_some_and(|m| ply >= m) {
            continue;
        }
        let legal = p.legal_moves();
        if legal == 0 {
            stack.push((p.swapped(), !ai, ply + 1));
        } else if ai {
            match db.answer(&p).best_move {
                Some(m) if db.get(&key).is_some() => stack.push((p.play(m), false, ply + 1)),
                _ => {
                    if missing.insert(key) {
                        set.missing.push(key);
                    }
                }
            }
        } else {
            for m in MoveSet(legal) {
                stack.push((p.play(m), true, ply + 1));
            }
        }
    }
    set.missing.sort_unstable();
    set
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A reachable position above the threshold without a record.
    Uncovered { key: CanonicalKey, turns: u8 },
    /// The oracle knows nothing of a stored position (not reachable from the root).
    Unknown { key: CanonicalKey },
    WrongValue { key: CanonicalKey, stored: Score, oracle: Score },
    /// The designated move leads to a child worth less than the position.
    BadBestMove { key: CanonicalKey, best_move: u8, attained: Option<Score>, oracle: Score },
    OnDemandMismatch { key: CanonicalKey, computed: Score, oracle: Score },
}

impl Violation {
    pub fn key(&self) -> CanonicalKey {
        match self {
            Violation::Uncovered { key, .. }
            | Violation::Unknown { key }
            | Violation::WrongValue { key, .. }
            | Violation::BadBestMove { key, .. }
            | Violation::OnDemandMismatch { key, .. } => *key,
        }
    }

    fn tsv(&self) -> String {
        match self {
            Violation::Uncovered { key, turns } => {
                let who = match *turns {
                    AI_TO_MOVE => "ai",
                    HUMAN_TO_MOVE => "human",
                    _ => "both",
                };
                format!("uncovered\t{key}\t{who} to move")
            }
            Violation::Unknown { key } => format!("unknown\t{key}\tnot reachable from the root"),
            Violation::WrongValue { key, stored, oracle } => format!("wrong-value\t{key}\tstored {stored} oracle {oracle}"),
            Violation::BadBestMove { key, best_move, attained, oracle } => {
                let got = attained.map_or("?".to_string(), |v| v.to_string());
                format!("bad-best-move\t{key}\tmove {best_move} attains {got} oracle {oracle}")
            }
            Violation::OnDemandMismatch { key, computed, oracle } => {
                format!("on-demand-mismatch\t{key}\tcomputed {computed} oracle {oracle}")
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub reachable: usize,
    pub records_checked: usize,
    pub on_demand_checked: usize,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// One line per violation; empty when the database passes.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for v in &self.violations {
            let _ = writeln!(out, "{}", v.tsv());
        }
        out
    }
}

/// Checks coverage of the union reachable set, every stored value, every
/// designated move, and on-demand answers at the threshold boundary.
pub fn verify_semi_strong(db: &SolutionDatabase, oracle: &OracleDb, root: &Position) -> VerifyReport {
    let size = db.size();
    let mut report = VerifyReport::default();
    let set = reachable_closure(db, root, Scenario::Union, None);
    report.reachable = set.len();

    let mut uncovered: Vec<(CanonicalKey, u8)> = set
        .turns
        .iter()
        .filter(|(key, _)| {
            let p = key.to_position(size);
            !p.is_terminal() && p.empties() > db.endgame_empties() && db.get(key).is_none()
        })
        .map(|(k, t)| (*k, *t))
        .collect();
    uncovered.sort_unstable();
    report.violations.extend(uncovered.into_iter().map(|(key, turns)| Violation::Uncovered { key, turns }));

    for r in db.records() {
        report.records_checked += 1;
        check_record(r, db, oracle, &mut report.violations);
    }

    let mut boundary: Vec<CanonicalKey> = set
        .turns
        .keys()
        .filter(|k| {
            let p = k.to_position(size);
            !p.is_terminal() && p.empties() <= db.endgame_empties()
        })
        .copied()
        .collect();
    boundary.sort_unstable();
    for key in boundary {
        let p = key.to_position(size);
        let Some(truth) = oracle.value(&p) else {
            report.violations.push(Violation::Unknown { key });
            continue;
        };
        report.on_demand_checked += 1;
        let (computed, mv) = solve_on_demand(&p);
        let attained = match mv {
            Some(m) => oracle.value(&p.play(m)).map(|c| -c),
            None => oracle.value(&p.swapped()).map(|c| -c),
        };
        if computed != truth || attained != Some(truth) {
            report.violations.push(Violation::OnDemandMismatch { key, computed, oracle: truth });
        }
    }
    report
}

fn check_record(r: &SolvedRecord, db: &SolutionDatabase, oracle: &OracleDb, out: &mut Vec<Violation>) {
    let key = r.key;
    let p = key.to_position(db.size());
    let Some(truth) = oracle.value_of_key(&key) else {
        out.push(Violation::Unknown { key });
        return;
    };
    if r.value as Score != truth {
        out.push(Violation::WrongValue { key, stored: r.value as Score, oracle: truth });
    }
    let child = if r.best_move == SolvedRecord::NO_MOVE { p.swapped() } else { p.play(Square(r.best_move)) };
    let attained = if r.best_move == SolvedRecord::NO_MOVE && p.legal_moves() != 0 {
        None
    } else {
        oracle.value(&child).map(|c| -c)
    };
    if attained != Some(truth) {
        out.push(Violation::BadBestMove { key, best_move: r.best_move, attained, oracle: truth });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::othello::BoardSize;

    #[test]
    fn terminal_root_has_a_single_entry() {
        let full = Position::from_bits_unchecked(BoardSize::Four, 0x00ff, 0xff00);
        let db = OracleDb::solve_all(&full, Traversal::Ascending, None).unwrap();
        assert_eq!(db.len(), 1);
        assert_eq!(db.root_value(), 0);
    }

    #[test]
    fn traversal_orders_agree_on_4x4() {
        let root = Position::initial(BoardSize::Four);
        let a = OracleDb::solve_all(&root, Traversal::Ascending, None).unwrap();
        let b = OracleDb::solve_all(&root, Traversal::Descending, None).unwrap();
        assert_eq!(a.len(), b.len());
        for (k, v) in a.iter() {
            assert_eq!(b.value_of_key(&k), Some(v));
        }
        assert!(a.inconsistencies().is_empty());
    }

    #[test]
    fn capacity_is_enforced() {
        let root = Position::initial(BoardSize::Four);
        let err = OracleDb::solve_all(&root, Traversal::Ascending, Some(100)).unwrap_err();
        assert!(matches!(err, Error::Capacity { limit: 100, .. }));
    }
}
