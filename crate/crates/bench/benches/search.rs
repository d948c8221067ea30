use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use semistrong::solver::{endgame_search, semi_strong_solve, weak_solve, SolverConfig};
use semistrong::{BoardSize, Position};
use semistrong_bench::playout_positions;

fn movegen(c: &mut Criterion) {
    let positions = playout_positions(BoardSize::Six, 4096, 7);
    c.bench_function("legal_moves_6x6", |b| {
        b.iter(|| positions.iter().map(|p| black_box(p).legal_moves().count_ones()).sum::<u32>())
    });
    c.bench_function("canonicalize_6x6", |b| {
        b.iter(|| positions.iter().map(|p| black_box(p).canonicalize().mover).fold(0, u64::wrapping_add))
    });
}

fn solve(c: &mut Criterion) {
    let root = Position::initial(BoardSize::Four);
    let config = SolverConfig::for_size(BoardSize::Four);
    c.bench_function("weak_solve_4x4", |b| b.iter(|| weak_solve(black_box(&root), &config).value));
    c.bench_function("semi_strong_solve_4x4", |b| {
        b.iter(|| semi_strong_solve(black_box(&root), &config).unwrap().database.len())
    });
    let endgames: Vec<Position> =
        playout_positions(BoardSize::Six, 20_000, 3).into_iter().filter(|p| p.empties() == 10).take(8).collect();
    let mut group = c.benchmark_group("endgame_6x6");
    group.sample_size(10);
    group.bench_function("ten_empties", |b| {
        b.iter(|| endgames.iter().map(|p| endgame_search(black_box(p), -37, 37)).sum::<i32>())
    });
    group.finish();
}

criterion_group!(benches, movegen, solve);
criterion_main!(benches);
