//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `ACCEPTANCE_QUICK=1` skips the long 6x6 runs (the weak solve and the
//! 14-16 disc exhaustive levels), which are then reported as SKIP.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semistrong::census::{
    census_exhaustive, census_search, CensusAlgo, CensusColumn, CensusOptions, CensusTable, ExhaustiveOptions,
};
use semistrong::oracle::{verify_semi_strong, OracleDb, Traversal};
use semistrong::solver::{semi_strong_solve, weak_solve, MoveOrdering, SearchMode, SolverConfig};
use semistrong::store::{open_store, write_store, Lookup, HEADER_LEN, RECORD_LEN};
use semistrong::theory::{closed_form_table, recurrence_table, simulate_structure, synthetic_search_counts, SyntheticTreeSpec};
use semistrong::{BoardSize, MoveSet, NodeKind, Position, SearchWindow};

const EXHAUSTIVE_6X6: [u64; 13] =
    [1, 1, 3, 14, 60, 314, 1_632, 9_069, 51_964, 292_946, 1_706_168, 9_289_258, 51_072_917];

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn quick() -> bool {
    std::env::var_os("ACCEPTANCE_QUICK").is_some_and(|v| !v.is_empty() && v != "0")
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn weak_solve_6x6() -> Outcome {
    if quick() {
        return Outcome::Skip("quick mode".into());
    }
    let start = Instant::now();
    let root = Position::initial(BoardSize::Six);
    let solution = weak_solve(&root, &SolverConfig::for_size(BoardSize::Six));
    let elapsed = start.elapsed();
    let pv: Vec<String> = solution.pv.iter().map(|m| m.name(BoardSize::Six)).collect();
    verdict(
        solution.value == -4 && elapsed < Duration::from_secs(3600),
        format!("value {} in {} (limit 3600s), pv {}", solution.value, secs(elapsed), pv.join(" ")),
    )
}

fn exhaustive_rows() -> Outcome {
    let max_discs = if quick() { 13 } else { 16 };
    let spill = tempfile::tempdir().expect("temp dir");
    let mut options = ExhaustiveOptions::new(max_discs);
    options.memory_keys = 1 << 24;
    options.spill_dir = Some(spill.path().to_path_buf());
    options.disk_budget = Some(8 << 30);
    let start = Instant::now();
    let run = match census_exhaustive(&Position::initial(BoardSize::Six), &options) {
        Ok(run) => run,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let mismatches: Vec<String> = (4..=max_discs)
        .filter_map(|d| {
            let want = EXHAUSTIVE_6X6[(d - 4) as usize];
            let got = run.counts.get(&d).copied();
            (got != Some(want)).then(|| format!("{d}: {got:?} != {want}"))
        })
        .collect();
    let detail = format!(
        "rows 4-{max_discs} in {}, peak spill {} MB{}",
        secs(start.elapsed()),
        run.peak_disk_bytes >> 20,
        if mismatches.is_empty() { String::new() } else { format!(", mismatches {}", mismatches.join("; ")) }
    );
    let ok = mismatches.is_empty() && run.halted.is_none() && run.peak_disk_bytes < 8 << 30;
    match (ok, quick()) {
        (true, true) => Outcome::Skip(format!("{detail} (rows 14-16 skipped in quick mode)")),
        _ => verdict(ok, detail),
    }
}

fn theory_equivalence() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    for b in 2..=8 {
        if recurrence_table(b, 24) != closed_form_table(b, 24) {
            problems.push(format!("recurrence b={b}"));
        }
    }
    let mut researches = 0;
    for b in 2..=4 {
        for depth in 1..=13 {
            let spec = SyntheticTreeSpec::new(b, depth, 0xacce97 ^ u64::from(b * 64 + depth)).unwrap();
            let closed = closed_form_table(b, depth);
            if simulate_structure(&spec) != closed {
                problems.push(format!("simulation b={b} D={depth}"));
            }
            let search = synthetic_search_counts(&spec).unwrap();
            if search.counts != closed {
                problems.push(format!("search b={b} D={depth}"));
            }
            researches += search.researches;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        problems.is_empty() && researches == 0 && elapsed < Duration::from_secs(60),
        format!("{} mismatches, {researches} re-searches, {}", problems.len(), secs(elapsed)),
    )
}

fn semi_strong_4x4() -> Outcome {
    let start = Instant::now();
    let root = Position::initial(BoardSize::Four);
    let solution = match semi_strong_solve(&root, &SolverConfig::for_size(BoardSize::Four)) {
        Ok(s) => s,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let oracle = OracleDb::solve_all(&root, Traversal::Ascending, None).unwrap();
    let report = verify_semi_strong(&solution.database, &oracle, &root);
    let elapsed = start.elapsed();
    verdict(
        report.passed() && elapsed < Duration::from_secs(60),
        format!(
            "{} records, {} reachable, {} violations, value {}, {}",
            solution.database.len(),
            report.reachable,
            report.violations.len(),
            solution.value,
            secs(elapsed)
        ),
    )
}

fn census_table(root: &Position, ordering: MoveOrdering) -> Result<CensusTable, String> {
    let mut table = CensusTable::new(root.size());
    for algo in [CensusAlgo::AlphaBeta, CensusAlgo::Reopening] {
        let census = census_search(algo, root, ordering.clone(), CensusOptions::default()).map_err(|e| e.to_string())?;
        table.set_column(algo.column(), &census.counts);
    }
    let run = census_exhaustive(root, &ExhaustiveOptions::new(root.size().squares())).map_err(|e| e.to_string())?;
    if let Some(e) = run.halted {
        return Err(e.to_string());
    }
    table.set_column(CensusColumn::Exhaustive, &run.counts);
    Ok(table)
}

/// A position on a principal variation of the 6x6 game with `empties`
/// empty squares: the opening line, then exact best moves.
fn pv_position(empties: u32) -> Position {
    let mut p = Position::initial(BoardSize::Six);
    let config = SolverConfig::for_size(BoardSize::Six);
    let mut engine = config.engine(BoardSize::Six, SearchMode::AlphaBeta);
    for mv in OPENING_6X6 {
        if p.empties() <= empties {
            break;
        }
        p = p.apply_move(semistrong::Square::parse(mv, BoardSize::Six).unwrap()).unwrap();
    }
    while p.empties() > empties && !p.is_terminal() {
        if p.legal_moves() == 0 {
            p = p.swapped();
            continue;
        }
        engine.solve(&p, NodeKind::P);
        p = p.play(semistrong::Square(engine.root_best_move().unwrap()));
    }
    p
}

/// First 16 plies of a principal variation of the 6x6 game (from `solve-weak --size 6`).
const OPENING_6X6: [&str; 16] =
    ["c2", "b4", "c5", "d2", "e4", "e3", "d1", "c1", "b1", "d5", "d6", "f4", "b3", "b2", "f3", "f2"];

fn monotone_census() -> Outcome {
    let four = Position::initial(BoardSize::Four);
    let oracle = std::sync::Arc::new(OracleDb::solve_all(&four, Traversal::Ascending, None).unwrap());
    let mut lines = Vec::new();
    let mut ok = true;
    let roots = [(four, MoveOrdering::Oracle(oracle)), (pv_position(14), MoveOrdering::Heuristic)];
    for (root, ordering) in roots {
        match census_table(&root, ordering) {
            Ok(table) => {
                let bad = table.monotonicity_violations();
                ok &= bad.is_empty();
                lines.push(format!(
                    "{}x{} from {} discs: totals {:?}/{:?}/{:?}, violations {:?}",
                    root.size().edge(),
                    root.size().edge(),
                    root.discs(),
                    table.total(CensusColumn::AlphaBeta).unwrap_or(0),
                    table.total(CensusColumn::Reopening).unwrap_or(0),
                    table.total(CensusColumn::Exhaustive).unwrap_or(0),
                    bad
                ));
            }
            Err(e) => {
                ok = false;
                lines.push(e);
            }
        }
    }
    verdict(ok, lines.join("; "))
}

fn ratio_sanity() -> Outcome {
    let totals = |root: &Position, algo| {
        census_search(algo, root, MoveOrdering::Heuristic, CensusOptions::default()).map(|c| c.total()).unwrap()
    };
    let four = Position::initial(BoardSize::Four);
    let (ab, re) = (totals(&four, CensusAlgo::AlphaBeta), totals(&four, CensusAlgo::Reopening));
    let mut trend = Vec::new();
    for empties in [8, 10, 12, 14] {
        let root = pv_position(empties);
        let (a, r) = (totals(&root, CensusAlgo::AlphaBeta), totals(&root, CensusAlgo::Reopening));
        trend.push(format!("{empties} empties {:.1}x", r as f64 / a as f64));
    }
    verdict(
        re > ab,
        format!(
            "4x4 reopening {re} vs alphabeta {ab} ({:.1}x); 6x6 trend {} (paper reports about 32x for the full game)",
            re as f64 / ab as f64,
            trend.join(", ")
        ),
    )
}

fn bound_soundness() -> Outcome {
    let root = Position::initial(BoardSize::Four);
    let oracle = OracleDb::solve_all(&root, Traversal::Ascending, None).unwrap();
    let config = SolverConfig::for_size(BoardSize::Four);
    let mut engines = [config.engine(BoardSize::Four, SearchMode::Reopening), config.engine(BoardSize::Four, SearchMode::AlphaBeta)];
    let mut rng = ChaCha8Rng::seed_from_u64(0xb0b);
    let mut violations = 0;
    let calls = 10_000;
    for i in 0..calls {
        let mut p = root;
        for _ in 0..rng.gen_range(0..11) {
            let moves: Vec<_> = MoveSet(p.legal_moves()).iter().collect();
            if moves.is_empty() {
                break;
            }
            p = p.play(moves[rng.gen_range(0..moves.len())]);
        }
        let truth = oracle.value(&p).unwrap();
        let window = SearchWindow::null(rng.gen_range(-17..17));
        let kind = if rng.gen_bool(0.5) { NodeKind::C } else { NodeKind::A };
        let r = engines[i % 2].search_root(&p, window, kind);
        let sound = if r <= window.alpha {
            truth <= r
        } else if r >= window.beta {
            truth >= r
        } else {
            truth == r
        };
        violations += usize::from(!sound);
    }
    verdict(violations == 0, format!("{violations} violations in {calls} calls"))
}

fn store_round_trip() -> Outcome {
    let root = Position::initial(BoardSize::Four);
    let db = semi_strong_solve(&root, &SolverConfig::for_size(BoardSize::Four)).unwrap().database;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("four.ssdb");
    write_store(&db, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let back = open_store(&path);
    let exact = back.as_ref().is_ok_and(|b| {
        *b == db && b.records().iter().all(|r| b.lookup(&r.key.to_position(BoardSize::Four)) == Lookup::Stored(*r))
    });
    let mut rejected = BTreeMap::new();
    let mut corrupt = |name: &str, f: &dyn Fn(&mut Vec<u8>)| {
        let mut b = bytes.clone();
        f(&mut b);
        std::fs::write(&path, &b).unwrap();
        rejected.insert(name.to_string(), open_store(&path).is_err());
    };
    corrupt("magic", &|b| b[0] ^= 0xff);
    corrupt("version", &|b| b[4] = 0x7f);
    corrupt("count", &|b| b[8] = b[8].wrapping_add(1));
    corrupt("unsorted", &|b| {
        let first = b[HEADER_LEN..HEADER_LEN + RECORD_LEN].to_vec();
        b.copy_within(HEADER_LEN + RECORD_LEN..HEADER_LEN + 2 * RECORD_LEN, HEADER_LEN);
        b[HEADER_LEN + RECORD_LEN..HEADER_LEN + 2 * RECORD_LEN].copy_from_slice(&first);
    });
    let all_rejected = rejected.values().all(|&r| r);
    verdict(
        exact && all_rejected,
        format!("{} records bit-exact: {exact}; rejected {:?}", db.len(), rejected),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--nocapture`; a filter
    // argument limits the run to criteria whose name contains it.
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: [Criterion; 8] = [
        ("weak-solve-6x6", weak_solve_6x6),
        ("exhaustive-census-rows", exhaustive_rows),
        ("theory-equivalence", theory_equivalence),
        ("semi-strong-4x4", semi_strong_4x4),
        ("monotone-census", monotone_census),
        ("ratio-sanity", ratio_sanity),
        ("bound-soundness", bound_soundness),
        ("store-round-trip", store_round_trip),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        let line = match run() {
            Outcome::Pass(d) => format!("PASS {name}: {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                format!("FAIL {name}: {d}")
            }
            Outcome::Skip(d) => format!("SKIP {name}: {d}"),
        };
        println!("{line}");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
