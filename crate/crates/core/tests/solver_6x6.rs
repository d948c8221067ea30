use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semistrong::oracle::{OracleDb, Traversal};
use semistrong::solver::{endgame_search, weak_solve, PvMove, SolverConfig};
use semistrong::{BoardSize, MoveSet, Position};

fn random_position(rng: &mut ChaCha8Rng, empties: u32) -> Option<Position> {
    let mut p = Position::initial(BoardSize::Six);
    while p.empties() > empties {
        let moves: Vec<_> = MoveSet(p.legal_moves()).iter().collect();
        if moves.is_empty() {
            if p.is_terminal() {
                return None;
            }
            p = p.swapped();
            continue;
        }
        p = p.play(moves[rng.gen_range(0..moves.len())]);
    }
    (!p.is_terminal()).then_some(p)
}

fn replay(p: &Position, pv: &[PvMove]) -> Position {
    pv.iter().fold(*p, |q, m| match m {
        PvMove::Move(sq) => q.apply_move(*sq).unwrap(),
        PvMove::Pass => q.apply_pass().unwrap(),
    })
}

fn check_pv(p: &Position, value: i32, pv: &[PvMove]) {
    let end = replay(p, pv);
    let sign = if pv.len().is_multiple_of(2) { 1 } else { -1 };
    assert_eq!(sign * end.final_score().unwrap(), value, "{}", p.notation());
}

/// Default 6x6 configuration (table above 8 empties, shortcut below)
/// against the exhaustive oracle, with the principal variation replayed.
#[test]
fn weak_solve_matches_oracle_on_late_positions() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let config = SolverConfig::for_size(BoardSize::Six);
    let mut solved = 0;
    while solved < 12 {
        let Some(p) = random_position(&mut rng, 9 + solved % 3) else { continue };
        let oracle = OracleDb::solve_all(&p, Traversal::Descending, None).unwrap();
        let solution = weak_solve(&p, &config);
        assert_eq!(solution.value, oracle.root_value(), "{}", p.notation());
        check_pv(&p, solution.value, &solution.pv);
        solved += 1;
    }
}

/// Midgame positions, where the shallow-search ordering is active, against
/// the table-free endgame search.
#[test]
fn weak_solve_matches_plain_search_on_midgame_positions() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let config = SolverConfig::for_size(BoardSize::Six);
    let mut solved = 0;
    while solved < 4 {
        let Some(p) = random_position(&mut rng, 14 + solved % 2) else { continue };
        let solution = weak_solve(&p, &config);
        assert_eq!(solution.value, endgame_search(&p, -37, 37), "{}", p.notation());
        check_pv(&p, solution.value, &solution.pv);
        solved += 1;
    }
}

#[test]
fn endgame_search_is_fail_soft_and_exact_with_full_window() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let empties = rng.gen_range(1..=10);
        let Some(p) = random_position(&mut rng, empties) else { continue };
        let truth = OracleDb::solve_all(&p, Traversal::Ascending, None).unwrap().root_value();
        assert_eq!(endgame_search(&p, -37, 37), truth, "{}", p.notation());
        let alpha = rng.gen_range(-36..36);
        let r = endgame_search(&p, alpha, alpha + 1);
        assert!(if r <= alpha { truth <= r } else { truth >= r }, "{} alpha {alpha}: {r} vs {truth}", p.notation());
    }
}
