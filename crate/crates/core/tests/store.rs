use std::fs;

use semistrong::oracle::{OracleDb, Traversal};
use semistrong::solver::{semi_strong_solve, SolverConfig};
use semistrong::store::{open_store, write_store, AnswerStatus, Lookup, SolutionDatabase, HEADER_LEN, RECORD_LEN};
use semistrong::{BoardSize, MoveSet, Position};

fn four() -> SolutionDatabase {
    semi_strong_solve(&Position::initial(BoardSize::Four), &SolverConfig::for_size(BoardSize::Four)).unwrap().database
}

#[test]
fn file_round_trip_is_bit_exact() {
    let db = four();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("four.ssdb");
    write_store(&db, &path).unwrap();
    let bytes = fs::read(&path).unwrap();
    assert_eq!(bytes.len(), HEADER_LEN + RECORD_LEN * db.len());
    assert_eq!(&bytes[..4], b"SSDB");
    assert_eq!(bytes[6], 4);
    let back = open_store(&path).unwrap();
    assert_eq!(back, db);
    // rewriting gives the same bytes
    let again = dir.path().join("again.ssdb");
    write_store(&back, &again).unwrap();
    assert_eq!(fs::read(&again).unwrap(), bytes);
    // lookups agree record by record
    for r in db.records() {
        assert_eq!(back.lookup(&r.key.to_position(BoardSize::Four)), Lookup::Stored(*r));
    }
}

type Corruption = (&'static str, Box<dyn Fn(&mut Vec<u8>)>);

#[test]
fn corruption_is_rejected_at_open() {
    let db = four();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("four.ssdb");
    write_store(&db, &path).unwrap();
    let good = fs::read(&path).unwrap();
    let cases: Vec<Corruption> = vec![
        ("magic", Box::new(|b| b[1] = b'X')),
        ("version", Box::new(|b| b[4] = 2)),
        ("size", Box::new(|b| b[6] = 5)),
        ("count", Box::new(|b| b[8] ^= 1)),
        ("truncated", Box::new(|b| b.truncate(b.len() - 3))),
        (
            "order",
            Box::new(|b| {
                let (x, y) = (HEADER_LEN, HEADER_LEN + RECORD_LEN);
                let first: Vec<u8> = b[x..y].to_vec();
                b.copy_within(y..y + RECORD_LEN, x);
                b[y..y + RECORD_LEN].copy_from_slice(&first);
            }),
        ),
        ("kinds", Box::new(|b| b[HEADER_LEN + 19] = 0)),
    ];
    for (name, corrupt) in cases {
        let mut bytes = good.clone();
        corrupt(&mut bytes);
        fs::write(&path, &bytes).unwrap();
        assert!(open_store(&path).is_err(), "{name} corruption was accepted");
    }
}

#[test]
fn endgames_are_answered_on_demand_with_oracle_values() {
    // store of a 6x6 line with E = 10 holds nothing at or below 10 empties
    let db = SolutionDatabase::new(BoardSize::Six, 10, vec![]).unwrap();
    let mut p = Position::initial(BoardSize::Six);
    let mut seed = 5u64;
    let mut checked = 0;
    while !p.is_terminal() {
        if p.empties() <= 10 && p.legal_moves() != 0 {
            let oracle = OracleDb::solve_all(&p, Traversal::Ascending, None).unwrap();
            let a = db.answer(&p);
            assert_eq!(a.status, AnswerStatus::OnDemand);
            assert_eq!(a.value, Some(oracle.root_value()));
            let child = p.play(a.best_move.unwrap());
            assert_eq!(-oracle.value(&child).unwrap(), oracle.root_value());
            checked += 1;
            if checked == 3 {
                break;
            }
        }
        let moves: Vec<_> = MoveSet(p.legal_moves()).iter().collect();
        if moves.is_empty() {
            p = p.swapped();
            continue;
        }
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        p = p.play(moves[(seed >> 33) as usize % moves.len()]);
    }
    assert_eq!(checked, 3);
    // above the threshold and absent: outside the guarantee
    assert_eq!(db.lookup(&Position::initial(BoardSize::Six)), Lookup::NotCovered);
}
