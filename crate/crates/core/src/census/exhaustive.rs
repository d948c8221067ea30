//! Level-synchronous breadth-first enumeration of reachable positions with
//! canonical deduplication.
//!
//! Every move adds one disc, so the level with `d` discs holds exactly the
//! positions reachable after `d - 4` moves. Positions whose mover must pass
//! are replaced by the passed position (same disc count), and terminal
//! positions are dropped: only positions with a legal move are counted.
//!
//! When a level's raw children outgrow the memory budget they are sorted,
//! deduplicated and spilled as runs of 16-byte little-endian keys (mover
//! then opponent), then combined by a k-way merge into the level file.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::othello::{BoardSize, CanonicalKey, MoveSet, Position};

const KEY_BYTES: u64 = 16;
const READ_CHUNK: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct ExhaustiveOptions {
    /// Enumerate levels up to and including this disc count.
    pub max_discs: u32,
    /// Keys buffered in memory before a sorted run is written to disk.
    pub memory_keys: usize,
    /// Parent directory for spill files; the system temp dir if `None`.
    pub spill_dir: Option<PathBuf>,
    /// Bytes of spill files allowed to exist at once.
    pub disk_budget: Option<u64>,
}

impl ExhaustiveOptions {
    pub fn new(max_discs: u32) -> ExhaustiveOptions {
        ExhaustiveOptions { max_discs, memory_keys: 1 << 25, spill_dir: None, disk_budget: None }
    }
}

#[derive(Debug)]
pub struct ExhaustiveRun {
    /// Unique positions with a legal move, per disc count, for every complete level.
    pub counts: BTreeMap<u32, u64>,
    /// Why enumeration stopped before `max_discs`, if it did.
    pub halted: Option<Error>,
    pub spilled_runs: usize,
    pub peak_disk_bytes: u64,
}

enum Level {
    Memory(Vec<u128>),
    File { path: PathBuf, count: u64 },
}

impl Level {
    fn count(&self) -> u64 {
        match self {
            Level::Memory(v) => v.len() as u64,
            Level::File { count, .. } => *count,
        }
    }

    fn for_each_chunk(&self, mut f: impl FnMut(&[u128]) -> Result<()>) -> Result<()> {
        match self {
            Level::Memory(v) => v.chunks(READ_CHUNK).try_for_each(f),
            Level::File { path, .. } => {
                let mut reader = KeyReader::open(path)?;
                let mut chunk = Vec::with_capacity(READ_CHUNK);
                loop {
                    chunk.clear();
                    while chunk.len() < READ_CHUNK {
                        match reader.next()? {
                            Some(k) => chunk.push(k),
                            None => break,
                        }
                    }
                    if chunk.is_empty() {
                        return Ok(());
                    }
                    f(&chunk)?;
                }
            }
        }
    }
}

struct Disk {
    dir: tempfile::TempDir,
    budget: Option<u64>,
    used: u64,
    peak: u64,
    files: usize,
    runs: usize,
}

impl Disk {
    fn reserve(&mut self, bytes: u64, last_complete: u32) -> Result<()> {
        if let Some(budget) = self.budget {
            if self.used + bytes > budget {
                return Err(Error::SpillBudget { budget, last_complete });
            }
        }
        self.used += bytes;
        self.peak = self.peak.max(self.used);
        Ok(())
    }

    fn release(&mut self, path: &Path, bytes: u64) -> Result<()> {
        fs::remove_file(path)?;
        self.used -= bytes;
        Ok(())
    }

    fn new_path(&mut self, tag: &str) -> PathBuf {
        self.files += 1;
        self.dir.path().join(format!("{tag}-{}.bin", self.files))
    }
}

/// Enumerates every reachable position with a legal move, level by level,
/// up to `options.max_discs` discs.
pub fn census_exhaustive(root: &Position, options: &ExhaustiveOptions) -> Result<ExhaustiveRun> {
    let start = if root.legal_moves() == 0 && root.opponent_moves() != 0 { root.swapped() } else { *root };
    let mut counts = BTreeMap::new();
    let dir = match &options.spill_dir {
        Some(d) => {
            fs::create_dir_all(d)?;
            tempfile::Builder::new().prefix("census-").tempdir_in(d)?
        }
        None => tempfile::Builder::new().prefix("census-").tempdir()?,
    };
    let mut disk = Disk { dir, budget: options.disk_budget, used: 0, peak: 0, files: 0, runs: 0 };
    let mut halted = None;
    if start.legal_moves() != 0 && start.discs() <= options.max_discs {
        let mut discs = start.discs();
        let mut level = Level::Memory(vec![start.canonicalize().as_u128()]);
        counts.insert(discs, 1);
        while discs < options.max_discs {
            let next = match next_level(root.size(), &level, discs, options.memory_keys, &mut disk) {
                Ok(next) => next,
                Err(e @ Error::SpillBudget { .. }) => {
                    halted = Some(e);
                    break;
                }
                Err(e) => return Err(e),
            };
            if let Level::File { path, count } = &level {
                disk.release(path, count * KEY_BYTES)?;
            }
            discs += 1;
            if next.count() == 0 {
                break;
            }
            log::debug!("level {discs}: {} positions", next.count());
            counts.insert(discs, next.count());
            level = next;
        }
    }
    Ok(ExhaustiveRun { counts, halted, spilled_runs: disk.runs, peak_disk_bytes: disk.peak })
}

fn push_children(size: BoardSize, key: u128, out: &mut SmallVec<[u128; 16]>) {
    let p = CanonicalKey::from_u128(key).to_position(size);
    for m in MoveSet(p.legal_moves()) {
        let mut child = p.play(m);
        if child.legal_moves() == 0 {
            if child.opponent_moves() == 0 {
                continue;
            }
            child = child.swapped();
        }
        out.push(child.canonicalize().as_u128());
    }
}

fn next_level(size: BoardSize, level: &Level, discs: u32, memory_keys: usize, disk: &mut Disk) -> Result<Level> {
    let mut buffer: Vec<u128> = Vec::new();
    let mut runs: Vec<(PathBuf, u64)> = Vec::new();
    level.for_each_chunk(|chunk| {
        let children: Vec<u128> = chunk
            .par_iter()
            .flat_map_iter(|&k| {
                let mut out = SmallVec::new();
                push_children(size, k, &mut out);
                out
            })
            .collect();
        buffer.extend_from_slice(&children);
        if buffer.len() >= memory_keys {
            buffer.par_sort_unstable();
            buffer.dedup();
            // Spill only when deduplication did not free most of the budget.
            if buffer.len() >= memory_keys / 2 {
                let path = disk.new_path("run");
                let bytes = buffer.len() as u64 * KEY_BYTES;
                disk.reserve(bytes, discs)?;
                write_keys(&path, &buffer)?;
                disk.runs += 1;
                runs.push((path, bytes));
                buffer.clear();
            }
        }
        Ok(())
    })?;
    buffer.par_sort_unstable();
    buffer.dedup();
    if runs.is_empty() {
        return Ok(Level::Memory(buffer));
    }
    if !buffer.is_empty() {
        let path = disk.new_path("run");
        let bytes = buffer.len() as u64 * KEY_BYTES;
        disk.reserve(bytes, discs)?;
        write_keys(&path, &buffer)?;
        disk.runs += 1;
        runs.push((path, bytes));
    }
    drop(buffer);
    let total: u64 = runs.iter().map(|(_, b)| b).sum();
    disk.reserve(total, discs)?;
    let path = disk.new_path("level");
    let count = merge_runs(&runs, &path)?;
    disk.used -= total - count * KEY_BYTES;
    for (run, bytes) in &runs {
        disk.release(run, *bytes)?;
    }
    Ok(Level::File { path, count })
}

fn write_keys(path: &Path, keys: &[u128]) -> Result<()> {
    let mut w = BufWriter::with_capacity(1 << 20, File::create(path)?);
    for &k in keys {
        write_key(&mut w, k)?;
    }
    w.flush()?;
    Ok(())
}

#[inline]
fn write_key(w: &mut impl Write, key: u128) -> io::Result<()> {
    let k = CanonicalKey::from_u128(key);
    w.write_all(&k.mover.to_le_bytes())?;
    w.write_all(&k.opponent.to_le_bytes())
}

struct KeyReader(BufReader<File>);

impl KeyReader {
    fn open(path: &Path) -> Result<KeyReader> {
        Ok(KeyReader(BufReader::with_capacity(1 << 20, File::open(path)?)))
    }

    fn next(&mut self) -> Result<Option<u128>> {
        let mut buf = [0u8; 16];
        match self.0.read_exact(&mut buf) {
            Ok(()) => {}
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
            Err(e) => return Err(e.into()),
        }
        let mover = u64::from_le_bytes(buf[..8].try_into().unwrap());
        let opponent = u64::from_le_bytes(buf[8..].try_into().unwrap());
        Ok(Some(CanonicalKey { mover, opponent }.as_u128()))
    }
}

/// K-way merge of sorted, individually deduplicated runs into `out`,
/// dropping duplicates across runs. Returns the number of keys written.
fn merge_runs(runs: &[(PathBuf, u64)], out: &Path) -> Result<u64> {
    let mut readers = runs.iter().map(|(p, _)| KeyReader::open(p)).collect::<Result<Vec<_>>>()?;
    let mut heap = BinaryHeap::with_capacity(readers.len());
    for (i, r) in readers.iter_mut().enumerate() {
        if let Some(k) = r.next()? {
            heap.push(Reverse((k, i)));
        }
    }
    let mut w = BufWriter::with_capacity(1 << 20, File::create(out)?);
    let mut last = None;
    let mut count = 0;
    while let Some(Reverse((k, i))) = heap.pop() {
        if last != Some(k) {
            write_key(&mut w, k)?;
            count += 1;
            last = Some(k);
        }
        if let Some(next) = readers[i].next()? {
            heap.push(Reverse((next, i)));
        }
    }
    w.flush()?;
    Ok(count)
}
