//! Elite pool and swap-path relinking between job sequences.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::construction::{decode_batches, DecodeMode};
use crate::error::{Error, Result};
use crate::model::{count_tardy, Instance, JobId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliteEntry {
    pub sequence: Vec<JobId>,
    pub tardy_count: usize,
}

impl EliteEntry {
    /// Scores `sequence` with the deterministic improved decode.
    pub fn scored(instance: &Instance, sequence: Vec<JobId>) -> Self {
        let tardy_count = sequence_fitness(instance, &sequence);
        EliteEntry { sequence, tardy_count }
    }

    fn rank(&self) -> (usize, &[JobId]) {
        (self.tardy_count, &self.sequence)
    }
}

/// Tardy count of the improved first-fit decode of `sequence`.
pub fn sequence_fitness(instance: &Instance, sequence: &[JobId]) -> usize {
    count_tardy(instance, &decode_batches(instance, sequence, DecodeMode::Improved))
}

pub const DEFAULT_POOL_CAPACITY: usize = 10;

/// Capped set of distinct sequences. Entries are ranked by tardy count, then
/// lexicographically by sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElitePool {
    entries: Vec<EliteEntry>,
    capacity: usize,
}

impl Default for ElitePool {
    fn default() -> Self {
        ElitePool::new(DEFAULT_POOL_CAPACITY)
    }
}

impl ElitePool {
    pub fn new(capacity: usize) -> Self {
        ElitePool { entries: Vec::with_capacity(capacity), capacity: capacity.max(1) }
    }

    pub fn entries(&self) -> &[EliteEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    fn best_index(&self) -> Option<usize> {
        (0..self.entries.len()).min_by(|&a, &b| self.entries[a].rank().cmp(&self.entries[b].rank()))
    }

    fn worst_index(&self) -> Option<usize> {
        (0..self.entries.len()).max_by(|&a, &b| self.entries[a].rank().cmp(&self.entries[b].rank()))
    }

    pub fn best(&self) -> Option<&EliteEntry> {
        self.best_index().map(|i| &self.entries[i])
    }

    pub fn worst(&self) -> Option<&EliteEntry> {
        self.worst_index().map(|i| &self.entries[i])
    }

    /// Adds a candidate unless it duplicates an entry. When full, the worst
    /// entry is replaced only by a candidate with a strictly lower tardy count.
    /// Returns whether the pool changed.
    pub fn insert(&mut self, candidate: EliteEntry) -> bool {
        if self.entries.iter().any(|e| e.sequence == candidate.sequence) {
            return false;
        }
        if self.entries.len() < self.capacity {
            self.entries.push(candidate);
            return true;
        }
        let worst = self.worst_index().expect("full pool is non-empty");
        if candidate.tardy_count < self.entries[worst].tardy_count {
            self.entries[worst] = candidate;
            true
        } else {
            false
        }
    }
}

/// Walks from `initial` towards `guiding`: for each position where they differ,
/// swaps the guiding job into place. `visit` sees every intermediate sequence,
/// the last one being `guiding`. Returns the number of swaps.
pub fn relink_with<F: FnMut(&[JobId])>(initial: &[JobId], guiding: &[JobId], mut visit: F) -> Result<usize> {
    check_same_set(initial, guiding)?;
    let mut current = initial.to_vec();
    // position of each job in `current`, indexed by job index
    let mut position = vec![0usize; current.len()];
    for (i, id) in current.iter().enumerate() {
        position[id.index()] = i;
    }
    let mut swaps = 0;
    for n in 0..current.len() {
        if current[n] != guiding[n] {
            let t = position[guiding[n].index()];
            current.swap(n, t);
            position[current[n].index()] = n;
            position[current[t].index()] = t;
            swaps += 1;
            visit(&current);
        }
    }
    Ok(swaps)
}

fn check_same_set(a: &[JobId], b: &[JobId]) -> Result<()> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::NotSamePermutationSet);
    }
    let mut seen = vec![0u8; n];
    for (x, y) in a.iter().zip(b) {
        for (id, bit) in [(x, 1u8), (y, 2u8)] {
            if id.0 == 0 || id.index() >= n || seen[id.index()] & bit != 0 {
                return Err(Error::NotSamePermutationSet);
            }
            seen[id.index()] |= bit;
        }
    }
    Ok(())
}

/// Best intermediate on the path from `initial` to `guiding` (earliest on
/// ties). When the two are equal the initial sequence is returned.
pub fn relink<F: FnMut(&[JobId]) -> usize>(
    initial: &[JobId],
    guiding: &[JobId],
    mut evaluate: F,
) -> Result<(Vec<JobId>, usize)> {
    let mut best: Option<(Vec<JobId>, usize)> = None;
    relink_with(initial, guiding, |seq| {
        let v = evaluate(seq);
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((seq.to_vec(), v));
        }
    })?;
    Ok(best.unwrap_or_else(|| {
        let v = evaluate(initial);
        (initial.to_vec(), v)
    }))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelinkStats {
    pub iterations_run: usize,
    pub skipped: usize,
    pub intermediates: usize,
    pub inserted: usize,
}

/// Relinks a random pool entry towards the pool best, `iterations` times.
/// Intermediates better than the pool's worst entry are inserted. Returns the
/// best entry seen.
pub fn run_path_relinking<R: Rng + ?Sized, F: FnMut(&[JobId]) -> usize>(
    pool: &mut ElitePool,
    iterations: usize,
    rng: &mut R,
    mut evaluate: F,
) -> Result<(EliteEntry, RelinkStats)> {
    if pool.len() < 2 {
        return Err(Error::PoolTooSmall(pool.len()));
    }
    let mut stats = RelinkStats::default();
    let mut best = pool.best().cloned().expect("pool has entries");
    for _ in 0..iterations {
        if best.tardy_count == 0 {
            break;
        }
        let guide_idx = pool.best_index().expect("pool has entries");
        let mut pick = rng.gen_range(0..pool.len());
        if pick == guide_idx {
            pick = rng.gen_range(0..pool.len());
            if pick == guide_idx {
                stats.skipped += 1;
                continue;
            }
        }
        stats.iterations_run += 1;
        let initial = pool.entries[pick].sequence.clone();
        let guiding = pool.entries[guide_idx].sequence.clone();
        let mut found = Vec::new();
        relink_with(&initial, &guiding, |seq| {
            stats.intermediates += 1;
            found.push(EliteEntry { sequence: seq.to_vec(), tardy_count: evaluate(seq) });
        })?;
        for entry in found {
            if entry.rank() < best.rank() {
                best = entry.clone();
            }
            let beats_worst = pool.worst().is_none_or(|w| entry.tardy_count < w.tardy_count);
            if beats_worst && pool.insert(entry) {
                stats.inserted += 1;
            }
        }
    }
    Ok((best, stats))
}
