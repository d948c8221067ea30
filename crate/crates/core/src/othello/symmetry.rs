use std::sync::OnceLock;

use super::BoardSize;

/// One of the eight dihedral transforms of the square board.
///
/// Index meaning, on (row, col) of an N×N board with m = N - 1:
/// 0 identity, 1 (c, m-r), 2 (m-r, m-c), 3 (m-c, r), 4 (r, m-c),
/// 5 (m-r, c), 6 (c, r), 7 (m-c, m-r).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symmetry(u8);

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry(0);

    pub fn all() -> impl Iterator<Item = Symmetry> {
        (0..8).map(Symmetry)
    }

    pub fn from_index(index: u8) -> Option<Symmetry> {
        (index < 8).then_some(Symmetry(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn inverse(self) -> Symmetry {
        // rotations by 90 and 270 degrees are each other's inverse; the rest are involutions
        match self.0 {
            1 => Symmetry(3),
            3 => Symmetry(1),
            s => Symmetry(s),
        }
    }

    fn map_coords(self, edge: u32, row: u32, col: u32) -> (u32, u32) {
        let m = edge - 1;
        match self.0 {
            0 => (row, col),
            1 => (col, m - row),
            2 => (m - row, m - col),
            3 => (m - col, row),
            4 => (row, m - col),
            5 => (m - row, col),
            6 => (col, row),
            _ => (m - col, m - row),
        }
    }

    #[inline]
    pub fn map_square(self, size: BoardSize, square: u8) -> u8 {
        tables(size).squares[self.0 as usize][square as usize]
    }

    #[inline]
    pub fn map_bits(self, size: BoardSize, bits: u64) -> u64 {
        let t = tables(size);
        let edge = size.edge();
        let row_mask = (1u64 << edge) - 1;
        let luts = &t.rows[self.0 as usize];
        let mut out = 0;
        for (r, lut) in luts.iter().enumerate().take(edge as usize) {
            out |= lut[((bits >> (r as u32 * edge)) & row_mask) as usize];
        }
        out
    }
}

struct Tables {
    squares: [[u8; 64]; 8],
    /// rows[sym][row][row bits] -> transformed bits
    rows: Vec<Vec<Vec<u64>>>,
}

fn build(size: BoardSize) -> Tables {
    let edge = size.edge();
    let mut squares = [[0u8; 64]; 8];
    let mut rows = Vec::with_capacity(8);
    for sym in Symmetry::all() {
        for r in 0..edge {
            for c in 0..edge {
                let (r2, c2) = sym.map_coords(edge, r, c);
                squares[sym.0 as usize][(r * edge + c) as usize] = (r2 * edge + c2) as u8;
            }
        }
        let mut per_row = Vec::with_capacity(edge as usize);
        for r in 0..edge {
            let lut: Vec<u64> = (0u64..1 << edge)
                .map(|bits| {
                    (0..edge)
                        .filter(|c| bits >> c & 1 == 1)
                        .map(|c| 1u64 << squares[sym.0 as usize][(r * edge + c) as usize])
                        .fold(0, |a, b| a | b)
                })
                .collect();
            per_row.push(lut);
        }
        rows.push(per_row);
    }
    Tables { squares, rows }
}

fn tables(size: BoardSize) -> &'static Tables {
    static FOUR: OnceLock<Tables> = OnceLock::new();
    static SIX: OnceLock<Tables> = OnceLock::new();
    match size {
        BoardSize::Four => FOUR.get_or_init(|| build(BoardSize::Four)),
        BoardSize::Six => SIX.get_or_init(|| build(BoardSize::Six)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_undoes_every_transform() {
        for size in [BoardSize::Four, BoardSize::Six] {
            for sym in Symmetry::all() {
                for sq in 0..size.squares() as u8 {
                    assert_eq!(sym.inverse().map_square(size, sym.map_square(size, sq)), sq);
                }
            }
        }
    }

    #[test]
    fn transforms_are_distinct_permutations() {
        let size = BoardSize::Six;
        let images: std::collections::HashSet<Vec<u8>> = Symmetry::all()
            .map(|s| (0..36).map(|q| s.map_square(size, q)).collect())
            .collect();
        assert_eq!(images.len(), 8);
        for img in &images {
            let mut sorted = img.clone();
            sorted.sort();
            assert_eq!(sorted, (0..36).collect::<Vec<u8>>());
        }
    }

    #[test]
    fn bit_mapping_agrees_with_square_mapping() {
        let size = BoardSize::Six;
        for sym in Symmetry::all() {
            for sq in 0..36u8 {
                assert_eq!(sym.map_bits(size, 1 << sq), 1 << sym.map_square(size, sq));
            }
        }
    }
}
