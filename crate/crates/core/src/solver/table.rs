use std::hash::{BuildHasher, Hash};

use rustc_hash::{FxBuildHasher, FxHashMap};

use crate::error::{Error, Result};
use crate::kind::{KindFlags, NodeKind, SearchWindow};
use crate::othello::Score;

const NO_MOVE: u8 = u8::MAX;

#[derive(Clone, Copy)]
struct Slot<K> {
    key: K,
    lower: Score,
    upper: Score,
    best: u8,
    weight: u8,
}

/// Fixed-capacity bound table for C/A results (and plain alpha-beta).
///
/// Two-way buckets: the first way keeps the entry with the larger weight
/// (bigger subtree), the second is always replaced.
pub struct BoundTable<K> {
    slots: Vec<Option<Slot<K>>>,
    mask: usize,
    inf: Score,
}

impl<K: Copy + Eq + Hash> BoundTable<K> {
    pub fn new(log2_slots: u32, inf: Score) -> BoundTable<K> {
        let n = 1usize << log2_slots.max(1);
        BoundTable { slots: vec![None; n], mask: n - 1, inf }
    }

    #[inline]
    fn bucket(&self, key: &K) -> usize {
        (FxBuildHasher.hash_one(key) as usize) & self.mask & !1
    }

    pub fn probe(&self, key: &K) -> Option<KindFlags> {
        let b = self.bucket(key);
        self.slots[b..b + 2].iter().flatten().find(|s| s.key == *key).map(|s| {
            KindFlags::bounds(s.lower, s.upper, (s.best != NO_MOVE).then_some(s.best))
        })
    }

    /// Stores a fail-soft result `value` obtained with `window`.
    pub fn store(&mut self, key: K, weight: u8, window: SearchWindow, value: Score, best: Option<u8>) {
        let (lower, upper) = if value <= window.alpha {
            (-self.inf, value)
        } else if value >= window.beta {
            (value, self.inf)
        } else {
            (value, value)
        };
        let best = best.unwrap_or(NO_MOVE);
        let b = self.bucket(&key);
        for slot in self.slots[b..b + 2].iter_mut().flatten() {
            if slot.key == key {
                slot.lower = slot.lower.max(lower);
                slot.upper = slot.upper.min(upper);
                if slot.lower > slot.upper {
                    // a bound from a different search path contradicts; trust the newest
                    slot.lower = lower;
                    slot.upper = upper;
                }
                if best != NO_MOVE {
                    slot.best = best;
                }
                slot.weight = slot.weight.max(weight);
                return;
            }
        }
        let fresh = Some(Slot { key, lower, upper, best, weight });
        let idx = match (&self.slots[b], &self.slots[b + 1]) {
            (None, _) => b,
            (Some(s), _) if weight >= s.weight => {
                // demote the old first-way entry into the second way
                self.slots[b + 1] = self.slots[b];
                b
            }
            _ => b + 1,
        };
        self.slots[idx] = fresh;
    }

    pub fn clear(&mut self) {
        self.slots.iter_mut().for_each(|s| *s = None);
    }
}

/// Unbounded (or explicitly limited) table of discharged exact obligations.
pub struct RecordTable<K> {
    map: FxHashMap<K, KindFlags>,
    limit: Option<usize>,
}

impl<K: Copy + Eq + Hash> RecordTable<K> {
    pub fn new(limit: Option<usize>) -> RecordTable<K> {
        RecordTable { map: FxHashMap::default(), limit }
    }

    #[inline]
    pub fn get(&self, key: &K) -> Option<&KindFlags> {
        self.map.get(key)
    }

    pub fn merge(&mut self, key: K, kind: NodeKind, value: Score, best: Option<u8>) -> Result<()> {
        if let Some(f) = self.map.get_mut(&key) {
            f.merge_solved(kind, value, best);
            return Ok(());
        }
        if let Some(limit) = self.limit {
            if self.map.len() >= limit {
                return Err(Error::Capacity { what: "solution records", limit });
            }
        }
        self.map.insert(key, KindFlags::solved(kind, value, best));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &KindFlags)> {
        self.map.iter()
    }

    pub fn remove(&mut self, key: &K) -> Option<KindFlags> {
        self.map.remove(key)
    }
}
