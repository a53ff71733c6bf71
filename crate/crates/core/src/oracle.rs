//! Exact reference solvers for small instances.
//!
//! `exhaustive_optimum` enumerates every capacity-feasible set partition of the
//! jobs (restricted-growth strings) and, for each partition, finds the best
//! batch order with a dynamic program over subsets of batches: the completion
//! time of whatever batch runs after a subset depends only on the subset, not
//! on its internal order.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Batch, BatchSchedule, Instance, JobId};

pub const DEFAULT_LIMIT: usize = 9;

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub optimum_tardy: usize,
    pub witness: BatchSchedule,
    /// Partial assignments visited during partition enumeration.
    pub nodes_explored: u64,
    pub partitions_evaluated: u64,
}

struct Search<'a> {
    instance: &'a Instance,
    blocks: Vec<Vec<usize>>,
    loads: Vec<u64>,
    best: usize,
    witness: Vec<Batch>,
    floor: usize,
    nodes: u64,
    partitions: u64,
}

impl Search<'_> {
    fn enumerate(&mut self, job: usize) {
        self.nodes += 1;
        if self.best <= self.floor {
            return;
        }
        let n = self.instance.len();
        if job == n {
            self.partitions += 1;
            let (t, order) = best_order(self.instance, &self.blocks);
            if t < self.best {
                self.best = t;
                self.witness = order
                    .iter()
                    .map(|&b| self.blocks[b].iter().map(|&i| JobId::from_index(i)).collect())
                    .collect();
            }
            return;
        }
        let size = self.instance.jobs()[job].size;
        for b in 0..self.blocks.len() {
            if self.loads[b] + size <= self.instance.capacity() {
                self.blocks[b].push(job);
                self.loads[b] += size;
                self.enumerate(job + 1);
                self.loads[b] -= size;
                self.blocks[b].pop();
            }
        }
        self.blocks.push(vec![job]);
        self.loads.push(size);
        self.enumerate(job + 1);
        self.blocks.pop();
        self.loads.pop();
    }
}

/// Minimum tardy count over all orders of the given batches, with one optimal
/// order.
fn best_order(instance: &Instance, blocks: &[Vec<usize>]) -> (usize, Vec<usize>) {
    let m = blocks.len();
    let jobs = instance.jobs();
    let proc: Vec<u64> = blocks.iter().map(|b| b.iter().map(|&i| jobs[i].processing).max().unwrap_or(0)).collect();
    let dues: Vec<Vec<u64>> = blocks
        .iter()
        .map(|b| {
            let mut d: Vec<u64> = b.iter().map(|&i| jobs[i].due).collect();
            d.sort_unstable();
            d
        })
        .collect();
    let full = (1usize << m) - 1;
    let mut span = vec![0u64; full + 1];
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        span[mask] = span[mask & (mask - 1)] + proc[low];
    }
    let mut cost = vec![usize::MAX; full + 1];
    let mut last = vec![0usize; full + 1];
    cost[0] = 0;
    for mask in 0..full {
        if cost[mask] == usize::MAX {
            continue;
        }
        for b in 0..m {
            if mask & (1 << b) != 0 {
                continue;
            }
            let done = span[mask] + proc[b];
            let late = dues[b].partition_point(|&d| d < done);
            let next = mask | (1 << b);
            let c = cost[mask] + late;
            if c < cost[next] {
                cost[next] = c;
                last[next] = b;
            }
        }
    }
    let mut order = Vec::with_capacity(m);
    let mut mask = full;
    while mask != 0 {
        let b = last[mask];
        order.push(b);
        mask &= !(1 << b);
    }
    order.reverse();
    (cost[full], order)
}

/// Optimal tardy count by exhaustive search. Fails above `limit_n` jobs.
pub fn exhaustive_optimum(instance: &Instance, limit_n: usize) -> Result<OracleResult> {
    let n = instance.len();
    if n > limit_n {
        return Err(Error::TooLarge { n, limit: limit_n });
    }
    let mut search = Search {
        instance,
        blocks: Vec::with_capacity(n),
        loads: Vec::with_capacity(n),
        best: usize::MAX,
        witness: Vec::new(),
        floor: instance.tardy_lower_bound(),
        nodes: 0,
        partitions: 0,
    };
    search.enumerate(0);
    let witness = BatchSchedule::evaluate_unchecked(instance, search.witness);
    debug_assert_eq!(witness.tardy_count(), search.best);
    Ok(OracleResult {
        optimum_tardy: search.best,
        witness,
        nodes_explored: search.nodes,
        partitions_evaluated: search.partitions,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MooreHodgson {
    /// Indices of on-time jobs in processing (due date) order.
    pub on_time: Vec<usize>,
    /// Indices of late jobs, ascending.
    pub tardy: Vec<usize>,
    pub tardy_count: usize,
}

/// Optimal number of late jobs on a machine that processes one job at a time.
/// Jobs are `(processing, due)` pairs, referred to by their index.
pub fn moore_hodgson(jobs: &[(u64, u64)]) -> MooreHodgson {
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by_key(|&i| (jobs[i].1, i));
    let mut kept: BinaryHeap<(u64, usize)> = BinaryHeap::new();
    let mut removed = Vec::new();
    let mut clock = 0u64;
    for i in order {
        let (p, d) = jobs[i];
        kept.push((p, i));
        clock += p;
        if clock > d {
            let (q, j) = kept.pop().expect("just pushed");
            clock -= q;
            removed.push(j);
        }
    }
    let mut on_time: Vec<usize> = kept.into_iter().map(|(_, i)| i).collect();
    on_time.sort_by_key(|&i| (jobs[i].1, i));
    removed.sort_unstable();
    MooreHodgson { tardy_count: removed.len(), on_time, tardy: removed }
}

/// Moore-Hodgson applied to an instance, with job ids.
pub fn moore_hodgson_instance(instance: &Instance) -> (Vec<JobId>, Vec<JobId>) {
    let pairs: Vec<(u64, u64)> = instance.jobs().iter().map(|j| (j.processing, j.due)).collect();
    let mh = moore_hodgson(&pairs);
    (
        mh.on_time.into_iter().map(JobId::from_index).collect(),
        mh.tardy.into_iter().map(JobId::from_index).collect(),
    )
}

/// True when no two jobs fit in a batch together, so every batch is a single
/// job and Moore-Hodgson is exact.
pub fn singleton_reduction_check(instance: &Instance) -> bool {
    let mut sizes: Vec<u64> = instance.jobs().iter().map(|j| j.size).collect();
    sizes.sort_unstable();
    match sizes.as_slice() {
        [a, b, ..] => a + b > instance.capacity(),
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{greedy_example, moves_example};
    use crate::model::check_partition;
    use crate::testdata::arb_instance;
    use proptest::prelude::*;

    fn all_permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn brute_single_machine(jobs: &[(u64, u64)]) -> usize {
        all_permutations(jobs.len())
            .into_iter()
            .map(|perm| {
                let mut t = 0;
                perm.iter()
                    .filter(|&&i| {
                        t += jobs[i].0;
                        t > jobs[i].1
                    })
                    .count()
            })
            .min()
            .unwrap()
    }

    /// Every batching, every batch order, by plain enumeration of job
    /// sequences cut into consecutive batches.
    fn brute_batch_optimum(inst: &Instance) -> usize {
        let n = inst.len();
        let mut best = usize::MAX;
        for perm in all_permutations(n) {
            for cuts in 0..(1u32 << (n - 1)) {
                let mut batches: Vec<Batch> = vec![vec![]];
                for (k, &i) in perm.iter().enumerate() {
                    if k > 0 && cuts & (1 << (k - 1)) != 0 {
                        batches.push(vec![]);
                    }
                    batches.last_mut().unwrap().push(JobId::from_index(i));
                }
                if check_partition(inst, &batches).is_ok() {
                    best = best.min(crate::model::count_tardy(inst, &batches));
                }
            }
        }
        best
    }

    #[test]
    fn two_jobs_share_a_batch() {
        let inst = Instance::from_triples(10, &[(5, 4, 5), (3, 4, 5)]).unwrap();
        let r = exhaustive_optimum(&inst, DEFAULT_LIMIT).unwrap();
        assert_eq!(r.optimum_tardy, 0);
        assert_eq!(r.witness.batches().len(), 1);
    }

    #[test]
    fn two_forced_singletons() {
        let inst = Instance::from_triples(10, &[(5, 6, 3), (3, 6, 3)]).unwrap();
        let r = exhaustive_optimum(&inst, DEFAULT_LIMIT).unwrap();
        assert_eq!(r.optimum_tardy, 1);
        assert_eq!(r.witness.batches()[0], vec![JobId(2)]);
    }

    #[test]
    fn too_large() {
        let inst = greedy_example();
        assert!(matches!(exhaustive_optimum(&inst, 8), Err(Error::TooLarge { n: 9, limit: 8 })));
    }

    #[test]
    fn worked_examples_optimum() {
        let g = exhaustive_optimum(&greedy_example(), DEFAULT_LIMIT).unwrap();
        check_partition(&greedy_example(), g.witness.batches()).unwrap();
        assert_eq!(g.witness.tardy_count(), g.optimum_tardy);
        assert!(g.optimum_tardy <= 5);
        let m = exhaustive_optimum(&moves_example(), DEFAULT_LIMIT).unwrap();
        assert!(m.optimum_tardy <= 3);
        assert_eq!(m.witness.tardy_count(), m.optimum_tardy);
    }

    #[test]
    fn moore_hodgson_example() {
        let mh = moore_hodgson(&[(4, 4), (3, 6), (2, 7)]);
        assert_eq!(brute_single_machine(&[(4, 4), (3, 6), (2, 7)]), 1);
        assert_eq!(mh.tardy_count, 1);
        assert_eq!(mh.on_time, vec![1, 2]);
        assert_eq!(mh.tardy, vec![0]);
    }

    #[test]
    fn moore_hodgson_trivial_cases() {
        assert_eq!(moore_hodgson(&[(3, 20), (4, 20), (5, 20)]).tardy_count, 0);
        assert_eq!(moore_hodgson(&[(3, 3)]).tardy_count, 0);
        assert_eq!(moore_hodgson(&[(4, 3)]).tardy_count, 1);
    }

    #[test]
    fn singleton_check() {
        let big = Instance::from_triples(40, &[(5, 21, 9), (5, 21, 9), (5, 21, 9)]).unwrap();
        assert!(singleton_reduction_check(&big));
        let mixed = Instance::from_triples(40, &[(5, 21, 9), (5, 19, 9), (5, 30, 9)]).unwrap();
        assert!(!singleton_reduction_check(&mixed));
        let one = Instance::from_triples(40, &[(5, 1, 9)]).unwrap();
        assert!(singleton_reduction_check(&one));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_sequence_enumeration(inst in arb_instance(6)) {
            let r = exhaustive_optimum(&inst, DEFAULT_LIMIT).unwrap();
            prop_assert_eq!(r.optimum_tardy, brute_batch_optimum(&inst));
            prop_assert!(check_partition(&inst, r.witness.batches()).is_ok());
            prop_assert_eq!(r.witness.tardy_count(), r.optimum_tardy);
        }

        #[test]
        fn moore_hodgson_is_optimal(jobs in prop::collection::vec((1u64..20, 1u64..60), 1..8)) {
            let mh = moore_hodgson(&jobs);
            prop_assert_eq!(mh.tardy_count, brute_single_machine(&jobs));
            let mut t = 0;
            for &i in &mh.on_time {
                t += jobs[i].0;
                prop_assert!(t <= jobs[i].1);
            }
        }
    }
}
