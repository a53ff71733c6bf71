//! Neighborhood moves and a first-improvement hill climber.
//!
//! Batch positions in this module are 0-based.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ScheduleError;
use crate::model::{batch_load, count_tardy, Batch, BatchSchedule, Instance, JobId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    Interchange,
    InsertA,
    InsertB,
}

impl MoveKind {
    pub const ROUND_ROBIN: [MoveKind; 3] = [MoveKind::Interchange, MoveKind::InsertA, MoveKind::InsertB];
}

/// Destination of a relocated job.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertTarget {
    Existing(usize),
    /// A new batch appended after the last one.
    NewBatch,
}

fn check_position(position: usize, len: usize) -> Result<(), ScheduleError> {
    if position >= len {
        Err(ScheduleError::InvalidPosition { position, len })
    } else {
        Ok(())
    }
}

/// Swaps the processing positions of two batches.
pub fn batch_interchange(
    instance: &Instance,
    schedule: &BatchSchedule,
    first: usize,
    second: usize,
) -> Result<BatchSchedule, ScheduleError> {
    let len = schedule.batches().len();
    check_position(first, len)?;
    check_position(second, len)?;
    if first == second {
        return Err(ScheduleError::InvalidPosition { position: second, len });
    }
    let mut batches = schedule.batches().to_vec();
    batches.swap(first, second);
    Ok(BatchSchedule::evaluate_unchecked(instance, batches))
}

/// The member with the longest processing time; lowest id on ties.
pub fn longest_job(instance: &Instance, batch: &[JobId]) -> Option<JobId> {
    batch.iter().copied().max_by_key(|&id| (instance.job(id).processing, std::cmp::Reverse(id)))
}

/// Feasible destinations for the longest job of `source`.
pub fn insert_a_targets(instance: &Instance, batches: &[Batch], source: usize) -> Vec<InsertTarget> {
    let Some(job) = batches.get(source).and_then(|b| longest_job(instance, b)) else {
        return Vec::new();
    };
    let size = instance.job(job).size;
    let mut targets: Vec<InsertTarget> = (0..batches.len())
        .filter(|&t| t != source && batch_load(instance, &batches[t]) + size <= instance.capacity())
        .map(InsertTarget::Existing)
        .collect();
    targets.push(InsertTarget::NewBatch);
    targets
}

fn apply_insert_a(
    instance: &Instance,
    batches: &mut Vec<Batch>,
    source: usize,
    target: InsertTarget,
) -> Result<JobId, ScheduleError> {
    let len = batches.len();
    check_position(source, len)?;
    let job = longest_job(instance, &batches[source]).ok_or(ScheduleError::InvalidPosition { position: source, len })?;
    if let InsertTarget::Existing(t) = target {
        check_position(t, len)?;
        if t == source {
            return Err(ScheduleError::InvalidPosition { position: t, len });
        }
        let load = batch_load(instance, &batches[t]) + instance.job(job).size;
        if load > instance.capacity() {
            return Err(ScheduleError::CapacityViolation { batch: t + 1, load, capacity: instance.capacity() });
        }
    }
    batches[source].retain(|&id| id != job);
    match target {
        InsertTarget::Existing(t) => batches[t].push(job),
        InsertTarget::NewBatch => batches.push(vec![job]),
    }
    if batches[source].is_empty() {
        batches.remove(source);
    }
    Ok(job)
}

/// Moves the longest job of `source` into `target`. An emptied source batch is
/// dropped.
pub fn insert_a(
    instance: &Instance,
    schedule: &BatchSchedule,
    source: usize,
    target: InsertTarget,
) -> Result<BatchSchedule, ScheduleError> {
    let mut batches = schedule.batches().to_vec();
    apply_insert_a(instance, &mut batches, source, target)?;
    Ok(BatchSchedule::evaluate_unchecked(instance, batches))
}

/// Jobs whose processing time exceeds `(1 + alpha)` times their batch mean, in
/// batch order.
pub fn insert_b_marked(instance: &Instance, batches: &[Batch], alpha: f64) -> Vec<JobId> {
    let mut marked = Vec::new();
    for batch in batches {
        let total: u64 = batch.iter().map(|&id| instance.job(id).processing).sum();
        let threshold = (1.0 + alpha) * total as f64;
        marked.extend(
            batch
                .iter()
                .copied()
                .filter(|&id| (instance.job(id).processing * batch.len() as u64) as f64 > threshold),
        );
    }
    marked
}

fn apply_insert_b(instance: &Instance, batches: &mut Vec<Batch>, alpha: f64) -> bool {
    let marked = insert_b_marked(instance, batches, alpha);
    if marked.is_empty() {
        return false;
    }
    for batch in batches.iter_mut() {
        batch.retain(|id| !marked.contains(id));
    }
    batches.retain(|b| !b.is_empty());
    let first_new = batches.len();
    for id in marked {
        let size = instance.job(id).size;
        let slot = (first_new..batches.len())
            .find(|&b| batch_load(instance, &batches[b]) + size <= instance.capacity());
        match slot {
            Some(b) => batches[b].push(id),
            None => batches.push(vec![id]),
        }
    }
    true
}

/// Pulls every job much longer than its batch mean out of its batch and
/// first-fits the pulled jobs into new batches appended at the end.
pub fn insert_b(instance: &Instance, schedule: &BatchSchedule, alpha: f64) -> BatchSchedule {
    let mut batches = schedule.batches().to_vec();
    apply_insert_b(instance, &mut batches, alpha);
    BatchSchedule::evaluate_unchecked(instance, batches)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalSearchConfig {
    /// Consecutive non-improving samples before the search stops.
    pub budget: usize,
    pub alpha: f64,
}

impl LocalSearchConfig {
    /// `50 * n` samples, threshold at the batch mean.
    pub fn for_instance(n: usize) -> Self {
        LocalSearchConfig { budget: 50 * n.max(1), alpha: 0.0 }
    }
}

#[derive(Clone, Debug)]
pub struct LocalSearchOutcome {
    pub schedule: BatchSchedule,
    pub samples: usize,
    pub accepted: usize,
}

/// Samples moves in round-robin order and keeps any that strictly lowers the
/// tardy count.
pub fn local_search<R: Rng + ?Sized>(
    instance: &Instance,
    schedule: &BatchSchedule,
    config: &LocalSearchConfig,
    rng: &mut R,
) -> LocalSearchOutcome {
    let floor = instance.tardy_lower_bound();
    let mut current = schedule.batches().to_vec();
    let mut tardy = count_tardy(instance, &current);
    let mut samples = 0;
    let mut accepted = 0;
    let mut idle = 0;
    let mut candidate: Vec<Batch> = Vec::new();

    while idle < config.budget.max(1) && tardy > floor {
        let kind = MoveKind::ROUND_ROBIN[samples % 3];
        samples += 1;
        let m = current.len();
        let improved = match kind {
            MoveKind::Interchange if m >= 2 => {
                let a = rng.gen_range(0..m);
                let b = (a + rng.gen_range(1..m)) % m;
                current.swap(a, b);
                let t = count_tardy(instance, &current);
                if t < tardy {
                    tardy = t;
                    true
                } else {
                    current.swap(a, b);
                    false
                }
            }
            MoveKind::Interchange => false,
            MoveKind::InsertA => {
                let source = rng.gen_range(0..m);
                let targets = insert_a_targets(instance, &current, source);
                let target = targets[rng.gen_range(0..targets.len())];
                candidate.clone_from(&current);
                apply_insert_a(instance, &mut candidate, source, target).expect("sampled target is feasible");
                try_accept(instance, &mut current, &mut candidate, &mut tardy)
            }
            MoveKind::InsertB => {
                candidate.clone_from(&current);
                apply_insert_b(instance, &mut candidate, config.alpha)
                    && try_accept(instance, &mut current, &mut candidate, &mut tardy)
            }
        };
        if improved {
            accepted += 1;
            idle = 0;
        } else {
            idle += 1;
        }
    }
    LocalSearchOutcome { schedule: BatchSchedule::evaluate_unchecked(instance, current), samples, accepted }
}

fn try_accept(instance: &Instance, current: &mut Vec<Batch>, candidate: &mut Vec<Batch>, tardy: &mut usize) -> bool {
    let t = count_tardy(instance, candidate);
    if t < *tardy {
        *tardy = t;
        std::mem::swap(current, candidate);
        true
    } else {
        false
    }
}
