//! Per-size move generation and flip rays for the row-major bit layout
//! (square index = row * N + column, a1 = bit 0).

/// Supported board edge lengths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoardSize {
    Four,
    Six,
}

impl BoardSize {
    pub fn from_edge(edge: u32) -> Option<BoardSize> {
        match edge {
            4 => Some(BoardSize::Four),
            6 => Some(BoardSize::Six),
            _ => None,
        }
    }

    #[inline]
    pub const fn edge(self) -> u32 {
        match self {
            BoardSize::Four => 4,
            BoardSize::Six => 6,
        }
    }

    #[inline]
    pub const fn squares(self) -> u32 {
        self.edge() * self.edge()
    }

    #[inline]
    pub const fn board_mask(self) -> u64 {
        (1u64 << self.squares()) - 1
    }
}

impl std::fmt::Display for BoardSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.edge())
    }
}

/// Squares where `mover` may legally place a disc on an `N`x`N` board.
#[inline(always)]
fn legal_moves_on<const N: u32>(mover: u64, opponent: u64) -> u64 {
    let board = (1u64 << (N * N)) - 1;
    let empty = !(mover | opponent) & board;
    // Opponent discs off the edge columns: sideways runs cannot wrap rows.
    let inner = opponent & !edge_columns(N);
    let mut moves = 0;
    moves |= run::<N>(mover, inner, 1, empty);
    moves |= run::<N>(mover, opponent, N, empty);
    moves |= run::<N>(mover, inner, N + 1, empty);
    moves |= run::<N>(mover, inner, N - 1, empty);
    moves
}

/// Empty squares closing a run of `opp` started by `mover`, in both senses of one axis.
#[inline(always)]
fn run<const N: u32>(mover: u64, opp: u64, shift: u32, empty: u64) -> u64 {
    let mut up = (mover << shift) & opp;
    let mut down = (mover >> shift) & opp;
    for _ in 0..N - 3 {
        up |= (up << shift) & opp;
        down |= (down >> shift) & opp;
    }
    ((up << shift) | (down >> shift)) & empty
}

const fn first_column(edge: u32) -> u64 {
    let mut mask = 0u64;
    let mut r = 0;
    while r < edge {
        mask |= 1u64 << (r * edge);
        r += 1;
    }
    mask
}

const fn edge_columns(edge: u32) -> u64 {
    first_column(edge) | first_column(edge) << (edge - 1)
}

/// Per-square rays for flip computation. The first four directions run
/// towards higher square indices, the last four towards lower ones.
pub(crate) struct Rays {
    rays: [[u64; 8]; 64],
}

impl Rays {
    const fn new(edge: u32) -> Rays {
        let steps: [(i32, i32); 8] = [(0, 1), (1, 0), (1, 1), (1, -1), (0, -1), (-1, 0), (-1, -1), (-1, 1)];
        let n = edge as i32;
        let mut rays = [[0u64; 8]; 64];
        let mut sq = 0;
        while sq < n * n {
            let mut d = 0;
            while d < 8 {
                let (dr, dc) = steps[d];
                let (mut r, mut c) = (sq / n + dr, sq % n + dc);
                while r >= 0 && r < n && c >= 0 && c < n {
                    rays[sq as usize][d] |= 1u64 << (r * n + c);
                    r += dr;
                    c += dc;
                }
                d += 1;
            }
            sq += 1;
        }
        Rays { rays }
    }

    /// Opponent discs flipped by placing a mover disc on `square`. Zero if
    /// the placement flips nothing.
    #[inline]
    pub fn flips(&self, mover: u64, opponent: u64, square: u32) -> u64 {
        let rays = &self.rays[square as usize];
        let mut flipped = 0;
        for &ray in &rays[..4] {
            let stops = ray & !opponent;
            let first = stops & stops.wrapping_neg();
            if first & mover != 0 {
                flipped |= ray & (first - 1);
            }
        }
        for &ray in &rays[4..] {
            let stops = ray & !opponent;
            if stops != 0 {
                let first = 1u64 << (63 - stops.leading_zeros());
                if first & mover != 0 {
                    flipped |= ray & !((first << 1) - 1);
                }
            }
        }
        flipped
    }
}

static RAYS_4: Rays = Rays::new(4);
static RAYS_6: Rays = Rays::new(6);

impl BoardSize {
    #[inline]
    pub(crate) fn legal_moves(self, mover: u64, opponent: u64) -> u64 {
        match self {
            BoardSize::Four => legal_moves_on::<4>(mover, opponent),
            BoardSize::Six => legal_moves_on::<6>(mover, opponent),
        }
    }

    /// Squares adjacent (in any of the 8 directions) to a square of `bits`.
    #[inline]
    pub fn neighbours(self, bits: u64) -> u64 {
        let n = self.edge();
        let first = first_column(n);
        let last = first << (n - 1);
        let row = bits | ((bits & !first) >> 1) | ((bits & !last) << 1);
        (row | row << n | row >> n) & self.board_mask() & !bits
    }

    #[inline]
    pub(crate) fn flips(self, mover: u64, opponent: u64, square: u32) -> u64 {
        match self {
            BoardSize::Four => RAYS_4.flips(mover, opponent, square),
            BoardSize::Six => RAYS_6.flips(mover, opponent, square),
        }
    }
}
