//! Node counts of the reopening search on uniform trees with optimal move
//! ordering: the per-kind recurrences, their closed forms, a literal
//! expansion of the kind-generation rules, and live search on synthetic trees.
//!
//! Depths start at 1 for the root; leaves sit at depth `D`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kind::{child_kind, NodeKind, SearchWindow};
use crate::othello::Score;
use crate::solver::{Engine, EngineOptions, Expansion, MoveBuf, SearchDomain, SearchMode};

/// Largest observed `total_nodes(b, D) / (D * b^ceil(D/2))` over
/// `b in 2..=8`, `D in 1..=24`, rounded up.
pub const GROWTH_CONSTANT: f64 = 1.500_305_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SyntheticTreeSpec {
    pub branching: u32,
    pub depth: u32,
    pub seed: u64,
}

impl SyntheticTreeSpec {
    pub fn new(branching: u32, depth: u32, seed: u64) -> Result<SyntheticTreeSpec> {
        if branching < 2 || depth < 1 {
            return Err(Error::Config(format!("need b >= 2 and D >= 1, got b={branching} D={depth}")));
        }
        Ok(SyntheticTreeSpec { branching, depth, seed })
    }

    /// Leaf values must fit a search score: b^(D-1) < 2^31.
    fn check_searchable(&self) -> Result<()> {
        match (self.branching as u64).checked_pow(self.depth - 1) {
            Some(n) if n < i32::MAX as u64 => Ok(()),
            _ => Err(Error::Config(format!("tree b={} D={} too large to search", self.branching, self.depth))),
        }
    }
}

/// `N(kind, d)` for `d` in `1..=D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthKindCount {
    cells: Vec<[u128; 5]>,
}

impl DepthKindCount {
    pub fn zeros(depth: u32) -> DepthKindCount {
        DepthKindCount { cells: vec![[0; 5]; depth as usize] }
    }

    pub fn depth(&self) -> u32 {
        self.cells.len() as u32
    }

    pub fn get(&self, kind: NodeKind, d: u32) -> u128 {
        self.cells[d as usize - 1][kind.index()]
    }

    fn add(&mut self, kind: NodeKind, d: u32, n: u128) {
        self.cells[d as usize - 1][kind.index()] += n;
    }

    pub fn total(&self) -> u128 {
        self.cells.iter().flatten().sum()
    }
}

/// `N(kind, d)` from the five recurrences, evaluated bottom-up.
pub fn count_recurrence(kind: NodeKind, d: u32, b: u32) -> u128 {
    recurrence_table(b, d).get(kind, d)
}

pub fn recurrence_table(b: u32, depth: u32) -> DepthKindCount {
    use NodeKind::*;
    let b = b as u128;
    let mut t = DepthKindCount::zeros(depth);
    for d in 1..=depth {
        if d == 1 {
            t.add(P, 1, 1);
            continue;
        }
        let prev = |k| t.get(k, d - 1);
        let row = [
            1,
            (b - 1) * prev(P) + b * prev(PPrime),
            prev(APrime),
            (b - 1) * prev(APrime) + b * prev(A),
            prev(C),
        ];
        t.cells[d as usize - 1] = row;
    }
    t
}

fn ceil_half(x: i64) -> i64 {
    x.div_euclid(2) + x.rem_euclid(2)
}

/// `c * b^e`, where a negative exponent only ever meets a zero coefficient.
fn term(c: i64, b: u32, e: i64) -> i128 {
    if c == 0 {
        return 0;
    }
    assert!(e >= 0, "nonzero coefficient on b^{e}");
    c as i128 * (b as i128).pow(e as u32)
}

/// `N(kind, d)` from the closed forms with mathematical ceilings. Valid for
/// every `d >= 1`: at `d = 1` the negative ceilings either vanish or multiply
/// a zero coefficient, giving the base cases.
pub fn count_closed_form(kind: NodeKind, d: u32, b: u32) -> u128 {
    let d = d as i64;
    let v = match kind {
        NodeKind::P => 1,
        NodeKind::APrime => term(1, b, ceil_half(d - 1)) - 1,
        NodeKind::PPrime => term(1, b, ceil_half(d - 2)) - 1,
        NodeKind::C => term(ceil_half(d - 2), b, ceil_half(d)) - term(ceil_half(d), b, ceil_half(d - 2)) + 1,
        NodeKind::A => term(ceil_half(d - 3), b, ceil_half(d - 1)) - term(ceil_half(d - 1), b, ceil_half(d - 3)) + 1,
    };
    u128::try_from(v).expect("closed forms are non-negative")
}

pub fn closed_form_table(b: u32, depth: u32) -> DepthKindCount {
    let mut t = DepthKindCount::zeros(depth);
    for d in 1..=depth {
        for k in NodeKind::ALL {
            t.add(k, d, count_closed_form(k, d, b));
        }
    }
    t
}

/// Sum of the closed forms over all kinds and depths `1..=D`.
pub fn total_nodes(b: u32, depth: u32) -> u128 {
    closed_form_table(b, depth).total()
}

/// `total_nodes(b, D) / (D * b^ceil(D/2))`.
pub fn growth_ratio(b: u32, depth: u32) -> f64 {
    let scale = depth as f64 * (b as f64).powi(ceil_half(depth as i64) as i32);
    total_nodes(b, depth) as f64 / scale
}

/// Expands the kind-generation rules node by node: P has one P child and
/// b-1 A' children, A' one P' child and b-1 C children, P' b A' children,
/// C a single A child (the cutoff), A b C children.
pub fn simulate_structure(spec: &SyntheticTreeSpec) -> DepthKindCount {
    let b = spec.branching;
    let mut t = DepthKindCount::zeros(spec.depth);
    let mut stack = vec![(NodeKind::P, 1u32)];
    while let Some((kind, d)) = stack.pop() {
        t.add(kind, d, 1);
        if d == spec.depth {
            continue;
        }
        let children = if kind == NodeKind::C { 1 } else { b };
        for i in 0..children {
            stack.push((child_kind(kind, i == 0), d + 1));
        }
    }
    t
}

/// A uniform tree whose leaf values are all distinct and whose first child
/// is strictly best at every node.
///
/// A leaf's value for the root player is a base-b number whose i-th digit
/// encodes the move taken at depth i. At the root player's nodes child 0
/// gets the top digit b-1 and at the opponent's nodes digit 0; the other
/// children get the remaining digits in a seed-dependent order. Higher
/// digits dominate, so the first child is always the best.
pub struct SyntheticTree {
    spec: SyntheticTreeSpec,
    inf: Score,
}

#[derive(Clone, Copy, Debug)]
pub struct SyntheticNode {
    depth: u32,
    id: u64,
    prefix: i64,
}

impl SyntheticTree {
    pub fn new(spec: SyntheticTreeSpec) -> Result<SyntheticTree> {
        spec.check_searchable()?;
        let inf = (spec.branching as Score).pow(spec.depth - 1) + 1;
        Ok(SyntheticTree { spec, inf })
    }

    pub fn root(&self) -> SyntheticNode {
        SyntheticNode { depth: 1, id: 0, prefix: 0 }
    }

    /// Digit assigned to child `c` of the node `(depth, id)`.
    fn digit(&self, depth: u32, id: u64, c: u32) -> u32 {
        let b = self.spec.branching;
        let root_player = depth % 2 == 1;
        let top = if root_player { b - 1 } else { 0 };
        if c == 0 {
            return top;
        }
        let mut rest: Vec<u32> = (0..b).filter(|&x| x != top).collect();
        let mut h = splitmix(self.spec.seed ^ splitmix(id ^ ((depth as u64) << 56)));
        for i in (1..rest.len()).rev() {
            h = splitmix(h);
            rest.swap(i, (h % (i as u64 + 1)) as usize);
        }
        rest[c as usize - 1]
    }

    /// Negamax value of a leaf for the player to move there.
    fn leaf_score(&self, node: &SyntheticNode) -> Score {
        let v = node.prefix as Score;
        if self.spec.depth % 2 == 1 {
            v
        } else {
            -v
        }
    }

    /// Exact negamax value of the root by the tree's construction.
    pub fn root_value(&self) -> Score {
        let mut node = self.root();
        while node.depth < self.spec.depth {
            node = self.child(&node, 0);
        }
        let v = self.leaf_score(&node);
        if self.spec.depth % 2 == 1 {
            v
        } else {
            -v
        }
    }

    fn child(&self, node: &SyntheticNode, c: u32) -> SyntheticNode {
        let b = self.spec.branching as i64;
        SyntheticNode {
            depth: node.depth + 1,
            id: node.id * self.spec.branching as u64 + c as u64,
            prefix: node.prefix * b + self.digit(node.depth, node.id, c) as i64,
        }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl SearchDomain for SyntheticTree {
    type Node = SyntheticNode;
    type Key = u64;
    type Frame = ();

    fn infinity(&self) -> Score {
        self.inf
    }

    fn expand(&mut self, node: &SyntheticNode, moves: &mut MoveBuf) -> Expansion {
        if node.depth == self.spec.depth {
            return Expansion::Terminal(self.leaf_score(node));
        }
        moves.extend((0..self.spec.branching).map(|c| c as u8));
        Expansion::Moves
    }

    fn play(&self, node: &SyntheticNode, mv: u8) -> SyntheticNode {
        self.child(node, mv as u32)
    }

    fn pass(&self, node: &SyntheticNode) -> SyntheticNode {
        *node
    }

    fn key(&self, _node: &SyntheticNode, _required: bool) -> Option<(u64, ())> {
        None
    }

    fn move_to_key_frame(&self, mv: u8, _: ()) -> u8 {
        mv
    }

    fn move_from_key_frame(&self, mv: u8, _: ()) -> u8 {
        mv
    }

    /// Children are generated best first.
    fn order(&mut self, _node: &SyntheticNode, _moves: &mut MoveBuf, _hint: Option<u8>) {}
}

#[derive(Clone, Debug)]
pub struct SyntheticSearch {
    pub counts: DepthKindCount,
    pub value: Score,
    pub researches: u64,
}

/// Runs the reopening search on the synthetic tree and counts visits per
/// kind per depth (leaves included).
pub fn synthetic_search_counts(spec: &SyntheticTreeSpec) -> Result<SyntheticSearch> {
    let tree = SyntheticTree::new(*spec)?;
    let options = EngineOptions { mode: SearchMode::Reopening, use_table: false, table_log2: 1, record_limit: None };
    let mut engine = Engine::new(tree, options);
    let root = engine.domain.root();
    let value = engine.search_root(&root, SearchWindow::full(engine.infinity()), NodeKind::P);
    let mut counts = DepthKindCount::zeros(spec.depth);
    for (i, row) in engine.stats.visits.iter().enumerate() {
        for k in NodeKind::ALL {
            counts.add(k, i as u32 + 1, row[k.index()] as u128);
        }
    }
    Ok(SyntheticSearch { counts, value, researches: engine.stats.researches })
}

/// TSV with one row per (kind, depth) and a total row. The simulated and
/// searched columns hold "-" when not computed.
pub fn theory_tsv(b: u32, depth: u32, simulated: Option<&DepthKindCount>, searched: Option<&DepthKindCount>) -> String {
    let rec = recurrence_table(b, depth);
    let closed = closed_form_table(b, depth);
    let cell = |t: Option<&DepthKindCount>, k, d| t.map_or("-".to_string(), |t| t.get(k, d).to_string());
    let mut out = String::from("kind\td\trecurrence\tclosed_form\tsimulated\tsearched\n");
    for k in NodeKind::ALL {
        for d in 1..=depth {
            let _ = writeln!(
                out,
                "{k}\t{d}\t{}\t{}\t{}\t{}",
                rec.get(k, d),
                closed.get(k, d),
                cell(simulated, k, d),
                cell(searched, k, d)
            );
        }
    }
    let total = |t: Option<&DepthKindCount>| t.map_or("-".to_string(), |t| t.total().to_string());
    let _ = writeln!(out, "total\t-\t{}\t{}\t{}\t{}", rec.total(), closed.total(), total(simulated), total(searched));
    out
}
