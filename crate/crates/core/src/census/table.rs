use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::othello::BoardSize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CensusColumn {
    AlphaBeta,
    Reopening,
    Exhaustive,
}

impl CensusColumn {
    pub const ALL: [CensusColumn; 3] = [CensusColumn::AlphaBeta, CensusColumn::Reopening, CensusColumn::Exhaustive];

    pub fn name(self) -> &'static str {
        match self {
            CensusColumn::AlphaBeta => "alphabeta",
            CensusColumn::Reopening => "reopening",
            CensusColumn::Exhaustive => "exhaustive",
        }
    }
}

/// Unique-position counts per disc count (rows 4..=N²) for up to three
/// columns. A missing cell means "not computed".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusTable {
    size: BoardSize,
    cells: BTreeMap<u32, [Option<u64>; 3]>,
}

impl CensusTable {
    pub fn new(size: BoardSize) -> CensusTable {
        CensusTable { size, cells: BTreeMap::new() }
    }

    pub fn size(&self) -> BoardSize {
        self.size
    }

    pub fn rows(&self) -> std::ops::RangeInclusive<u32> {
        4..=self.size.squares()
    }

    pub fn set(&mut self, column: CensusColumn, discs: u32, count: u64) {
        self.cells.entry(discs).or_default()[column as usize] = Some(count);
    }

    /// Fills a column from per-disc counts. Rows between the first and last
    /// given disc count that are absent are recorded as zero.
    pub fn set_column(&mut self, column: CensusColumn, counts: &BTreeMap<u32, u64>) {
        let (Some(&lo), Some(&hi)) = (counts.keys().next(), counts.keys().next_back()) else {
            return;
        };
        for d in lo..=hi {
            self.set(column, d, counts.get(&d).copied().unwrap_or(0));
        }
    }

    pub fn get(&self, column: CensusColumn, discs: u32) -> Option<u64> {
        self.cells.get(&discs).and_then(|row| row[column as usize])
    }

    pub fn total(&self, column: CensusColumn) -> Option<u64> {
        let cells: Vec<u64> = self.cells.values().filter_map(|row| row[column as usize]).collect();
        (!cells.is_empty()).then(|| cells.iter().sum())
    }

    /// Rows where two computed neighbouring columns break
    /// alphabeta <= reopening <= exhaustive.
    pub fn monotonicity_violations(&self) -> Vec<u32> {
        self.cells
            .iter()
            .filter(|(_, row)| {
                let pairs = [(row[0], row[1]), (row[1], row[2]), (row[0], row[2])];
                pairs.iter().any(|p| matches!(p, (Some(a), Some(b)) if a > b))
            })
            .map(|(&d, _)| d)
            .collect()
    }

    pub fn emit(&self) -> String {
        let mut out = String::from("discs\talphabeta\treopening\texhaustive\n");
        let cell = |v: Option<u64>| v.map_or("-".to_string(), |n| n.to_string());
        for d in self.rows() {
            let row = self.cells.get(&d).copied().unwrap_or_default();
            let _ = writeln!(out, "{d}\t{}\t{}\t{}", cell(row[0]), cell(row[1]), cell(row[2]));
        }
        let totals = CensusColumn::ALL.map(|c| cell(self.total(c)));
        let _ = writeln!(out, "total\t{}\t{}\t{}", totals[0], totals[1], totals[2]);
        out
    }

    /// Parses the output of [`CensusTable::emit`]; the board size is
    /// inferred from the last disc row and the totals row is checked.
    pub fn parse(text: &str) -> Result<CensusTable> {
        let bad = |line: &str| Error::Parse { what: "census table row", input: line.to_string() };
        let mut lines = text.lines();
        match lines.next() {
            Some("discs\talphabeta\treopening\texhaustive") => {}
            other => return Err(bad(other.unwrap_or(""))),
        }
        let mut cells = BTreeMap::new();
        let mut last = 0;
        let mut totals = None;
        for line in lines.filter(|l| !l.is_empty()) {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(bad(line));
            }
            let mut row = [None; 3];
            for (i, f) in fields[1..].iter().enumerate() {
                row[i] = match *f {
                    "-" => None,
                    n => Some(n.parse::<u64>().map_err(|_| bad(line))?),
                };
            }
            if fields[0] == "total" {
                totals = Some(row);
                continue;
            }
            let d: u32 = fields[0].parse().map_err(|_| bad(line))?;
            last = d;
            if row.iter().any(Option::is_some) {
                cells.insert(d, row);
            }
        }
        let size = match last {
            16 => BoardSize::Four,
            36 => BoardSize::Six,
            _ => return Err(bad(&format!("last row {last}"))),
        };
        let table = CensusTable { size, cells };
        if let Some(t) = totals {
            if t != CensusColumn::ALL.map(|c| table.total(c)) {
                return Err(bad("totals row does not match the column sums"));
            }
        }
        Ok(table)
    }
}
