//! Shared fixtures for the criterion benchmarks.

use semistrong::{BoardSize, MoveSet, Position};

/// Positions met along deterministic pseudo-random playouts from the initial position.
pub fn playout_positions(size: BoardSize, count: usize, mut seed: u64) -> Vec<Position> {
    let mut out = Vec::with_capacity(count);
    let mut p = Position::initial(size);
    while out.len() < count {
        if p.is_terminal() {
            p = Position::initial(size);
        }
        out.push(p);
        let moves: Vec<_> = MoveSet(p.legal_moves()).iter().collect();
        if moves.is_empty() {
            p = p.swapped();
            continue;
        }
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        p = p.play(moves[(seed >> 33) as usize % moves.len()]);
    }
    out
}
