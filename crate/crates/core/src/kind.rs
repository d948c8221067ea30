//! Node kinds of the reopening search, the child-kind transition, and the
//! rules for when a transposition-table entry may stand in for a search.

use std::fmt;

use crate::othello::Score;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    /// On the principal variation; turn unknown, exact value and best move required.
    P,
    /// AI to move after a human deviation; exact value and best move required.
    APrime,
    /// Human to move on the AI's best line; every reply must be solved.
    PPrime,
    /// Cut node: one refutation suffices.
    C,
    /// All node: every child must fail.
    A,
}

impl NodeKind {
    pub const ALL: [NodeKind; 5] = [NodeKind::P, NodeKind::APrime, NodeKind::PPrime, NodeKind::C, NodeKind::A];

    pub fn index(self) -> usize {
        self as usize
    }

    /// P, A' and P' must produce an exact value and a best move.
    pub fn is_exact(self) -> bool {
        matches!(self, NodeKind::P | NodeKind::APrime | NodeKind::PPrime)
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::P => "P",
            NodeKind::APrime => "A'",
            NodeKind::PPrime => "P'",
            NodeKind::C => "C",
            NodeKind::A => "A",
        }
    }

    pub fn parse(text: &str) -> Option<NodeKind> {
        NodeKind::ALL.into_iter().find(|k| k.name() == text)
    }

    fn flag(self) -> u8 {
        match self {
            NodeKind::P => KindFlags::SOLVED_P,
            NodeKind::APrime => KindFlags::SOLVED_APRIME,
            NodeKind::PPrime => KindFlags::SOLVED_PPRIME,
            NodeKind::C | NodeKind::A => KindFlags::BOUND,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Kind of a child node given the parent's kind and whether the child is the
/// first (most promising) one searched.
pub fn child_kind(kind: NodeKind, is_most_promising_child: bool) -> NodeKind {
    match (kind, is_most_promising_child) {
        (NodeKind::P, true) => NodeKind::P,
        (NodeKind::P, false) => NodeKind::APrime,
        (NodeKind::APrime, true) => NodeKind::PPrime,
        (NodeKind::APrime, false) => NodeKind::C,
        (NodeKind::PPrime, _) => NodeKind::APrime,
        (NodeKind::C, _) => NodeKind::A,
        (NodeKind::A, _) => NodeKind::C,
    }
}

/// Alpha-beta window with `alpha < beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchWindow {
    pub alpha: Score,
    pub beta: Score,
}

impl SearchWindow {
    pub fn new(alpha: Score, beta: Score) -> SearchWindow {
        debug_assert!(alpha < beta, "empty window ({alpha}, {beta})");
        SearchWindow { alpha, beta }
    }

    /// `(-inf, +inf)` where `inf` is the sentinel one past the largest score.
    pub fn full(inf: Score) -> SearchWindow {
        SearchWindow { alpha: -inf, beta: inf }
    }

    /// The window `(alpha, alpha + 1)`.
    pub fn null(alpha: Score) -> SearchWindow {
        SearchWindow { alpha, beta: alpha + 1 }
    }

    pub fn is_null(self) -> bool {
        self.beta == self.alpha + 1
    }

    /// The window as seen from the child: `(-beta, -alpha)`.
    pub fn negate(self) -> SearchWindow {
        SearchWindow { alpha: -self.beta, beta: -self.alpha }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundType {
    Exact,
    Lower,
    Upper,
}

/// What is known about a position: which exact-value obligations have been
/// discharged, the value bounds, and the designated best move.
///
/// `lower == upper` means the value is exact. An exact value is present
/// whenever one of the P/A'/P' flags is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KindFlags {
    pub bits: u8,
    pub lower: Score,
    pub upper: Score,
    pub best_move: Option<u8>,
}

impl KindFlags {
    pub const SOLVED_P: u8 = 1;
    pub const SOLVED_APRIME: u8 = 2;
    pub const SOLVED_PPRIME: u8 = 4;
    pub const BOUND: u8 = 8;
    pub const EXACT_MASK: u8 = Self::SOLVED_P | Self::SOLVED_APRIME | Self::SOLVED_PPRIME;

    pub fn solved(kind: NodeKind, value: Score, best_move: Option<u8>) -> KindFlags {
        KindFlags { bits: kind.flag(), lower: value, upper: value, best_move }
    }

    /// Bound-only information from a C/A search.
    pub fn bounds(lower: Score, upper: Score, best_move: Option<u8>) -> KindFlags {
        KindFlags { bits: Self::BOUND, lower, upper, best_move }
    }

    pub fn has(&self, kind: NodeKind) -> bool {
        self.bits & kind.flag() != 0
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// Bound type given the search's infinity sentinel. An entry bounded on
    /// both sides without being exact reports `Lower`.
    pub fn bound(&self, inf: Score) -> BoundType {
        if self.is_exact() {
            BoundType::Exact
        } else if self.upper >= inf || self.lower > -inf {
            BoundType::Lower
        } else {
            BoundType::Upper
        }
    }

    /// Records that the position has now been solved as `kind`.
    ///
    /// P or A' searches designate the best move; a P' search only fills it in
    /// when nothing is designated yet, because an A' designation points at a
    /// child solved as P' which a P' search does not guarantee.
    pub fn merge_solved(&mut self, kind: NodeKind, value: Score, best_move: Option<u8>) {
        debug_assert!(kind.is_exact());
        if self.bits & Self::EXACT_MASK != 0 {
            debug_assert_eq!(self.lower, value, "inconsistent exact values");
        }
        let designates = matches!(kind, NodeKind::P | NodeKind::APrime) || self.bits & Self::EXACT_MASK == 0;
        if designates {
            self.best_move = best_move;
        }
        self.bits |= kind.flag();
        self.lower = value;
        self.upper = value;
    }
}

/// Whether a stored entry allows skipping a search of kind `requested` with
/// window `window`.
///
/// P needs a prior P solve; A' a prior P or A' solve; P' a prior P or P'
/// solve. C and A accept any exact value or a bound that already answers the
/// window's question.
pub fn tt_admissible(requested: NodeKind, flags: &KindFlags, window: SearchWindow) -> bool {
    match requested {
        NodeKind::P => flags.has(NodeKind::P),
        NodeKind::APrime => flags.has(NodeKind::P) || flags.has(NodeKind::APrime),
        NodeKind::PPrime => flags.has(NodeKind::P) || flags.has(NodeKind::PPrime),
        NodeKind::C | NodeKind::A => {
            flags.is_exact() || flags.lower >= window.beta || flags.upper <= window.alpha
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;
    use NodeKind::*;

    const W: SearchWindow = SearchWindow { alpha: -3, beta: -2 };

    #[test]
    fn transition_table() {
        assert_eq!(child_kind(P, true), P);
        assert_eq!(child_kind(P, false), APrime);
        assert_eq!(child_kind(APrime, true), PPrime);
        assert_eq!(child_kind(APrime, false), C);
        for first in [true, false] {
            assert_eq!(child_kind(PPrime, first), APrime);
            assert_eq!(child_kind(C, first), A);
            assert_eq!(child_kind(A, first), C);
        }
    }

    #[test]
    fn closure_from_p_reaches_all_five_kinds() {
        let mut seen = BTreeSet::from([P]);
        let mut edges = BTreeSet::new();
        let mut frontier = vec![P];
        while let Some(k) = frontier.pop() {
            for first in [true, false] {
                let c = child_kind(k, first);
                edges.insert((k, c));
                if seen.insert(c) {
                    frontier.push(c);
                }
            }
        }
        assert_eq!(seen.len(), 5);
        let expected = BTreeSet::from([(P, P), (P, APrime), (APrime, PPrime), (APrime, C), (PPrime, APrime), (C, A), (A, C)]);
        assert_eq!(edges, expected);
    }

    #[test]
    fn admissibility_rules() {
        let a = KindFlags::solved(APrime, 2, Some(3));
        let p = KindFlags::solved(P, 2, Some(3));
        let pp = KindFlags::solved(PPrime, 2, Some(3));
        assert!(!tt_admissible(P, &a, W));
        assert!(tt_admissible(APrime, &p, W));
        assert!(!tt_admissible(PPrime, &a, W));
        assert!(tt_admissible(PPrime, &pp, W));
        assert!(tt_admissible(PPrime, &p, W));
        assert!(tt_admissible(C, &a, W));
        assert!(tt_admissible(A, &pp, W));
    }

    #[test]
    fn bounds_answer_only_their_side() {
        let inf = 100;
        let lower = KindFlags::bounds(-2, inf, None);
        assert_eq!(lower.bound(inf), BoundType::Lower);
        assert_eq!(KindFlags::bounds(-inf, 4, None).bound(inf), BoundType::Upper);
        assert!(tt_admissible(C, &lower, W));
        assert!(!tt_admissible(C, &lower, SearchWindow::null(-1)));
        let upper = KindFlags::bounds(-inf, -3, None);
        assert!(tt_admissible(A, &upper, W));
        assert!(!tt_admissible(A, &upper, SearchWindow::null(-5)));
        assert!(!tt_admissible(APrime, &lower, W));
    }

    #[test]
    fn merge_keeps_designation_of_stronger_kinds() {
        let mut f = KindFlags::solved(APrime, 1, Some(7));
        f.merge_solved(PPrime, 1, Some(9));
        assert_eq!(f.best_move, Some(7));
        assert!(f.has(APrime) && f.has(PPrime));
        f.merge_solved(P, 1, Some(11));
        assert_eq!(f.best_move, Some(11));
        let mut g = KindFlags::solved(PPrime, 0, Some(1));
        g.merge_solved(APrime, 0, Some(2));
        assert_eq!(g.best_move, Some(2));
    }

    #[test]
    fn names_round_trip() {
        for k in NodeKind::ALL {
            assert_eq!(NodeKind::parse(k.name()), Some(k));
        }
    }

    fn kind() -> impl Strategy<Value = NodeKind> {
        prop::sample::select(NodeKind::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn admissibility_is_monotone(
            requested in kind(),
            bits in 0u8..16,
            extra in 0u8..16,
            value in -20i32..20,
            lo in -20i32..20,
            width in 1i32..10,
            alpha in -20i32..20,
        ) {
            let window = SearchWindow::new(alpha, alpha + 1);
            let base = if bits & KindFlags::EXACT_MASK != 0 {
                KindFlags { bits, lower: value, upper: value, best_move: None }
            } else {
                KindFlags { bits, lower: lo, upper: lo + width, best_move: None }
            };
            // more flags and tighter (still consistent) bounds
            let mut more = base;
            more.bits |= extra;
            if more.bits & KindFlags::EXACT_MASK != 0 && !base.is_exact() {
                more.lower = base.lower;
                more.upper = base.lower;
            }
            if tt_admissible(requested, &base, window) {
                prop_assert!(tt_admissible(requested, &more, window));
            }
        }
    }
}
