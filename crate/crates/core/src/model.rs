//! Jobs, instances and batch schedules.
//!
//! A schedule is an ordered list of batches. Batches run back to back with no
//! idle time: a batch occupies the machine for the longest processing time of
//! its members, and every member completes when the batch does. A job is tardy
//! when its completion time is strictly greater than its due date.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::construction::{self, DecodeMode};
use crate::error::{InvalidInstance, ScheduleError, Violation};

/// 1-based job identifier. Within an [`Instance`] the ids are exactly `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobId(pub u32);

impl JobId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        JobId(index as u32 + 1)
    }
}

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One schedulable job. Ready time and weight are carried through files but
/// never affect evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Job {
    pub id: JobId,
    pub processing: u64,
    pub size: u64,
    pub due: u64,
    pub ready: u64,
    pub weight: u64,
}

impl Job {
    pub fn new(id: u32, processing: u64, size: u64, due: u64) -> Self {
        Job { id: JobId(id), processing, size, due, ready: 0, weight: 1 }
    }

    /// A job that is late even when processed first in a batch of its own.
    #[inline]
    pub fn intrinsically_tardy(&self) -> bool {
        self.processing > self.due
    }
}

/// Unvalidated job record as it appears in instance files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawJob {
    pub id: i64,
    pub p: i64,
    pub s: i64,
    pub d: i64,
    #[serde(default)]
    pub r: i64,
    #[serde(default = "one")]
    pub w: i64,
}

fn one() -> i64 {
    1
}

/// Unvalidated instance record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawInstance {
    pub capacity: i64,
    pub jobs: Vec<RawJob>,
}

/// A validated problem instance: jobs sorted by id plus the machine capacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    capacity: u64,
    jobs: Vec<Job>,
}

/// Checks every instance invariant and reports all violations at once.
pub fn validate_instance(raw: &RawInstance) -> Result<Instance, InvalidInstance> {
    let mut violations = Vec::new();
    if raw.jobs.is_empty() {
        violations.push(Violation::EmptyInstance);
    }
    if raw.capacity < 1 {
        violations.push(Violation::NonPositiveCapacity(raw.capacity));
    }
    let n = raw.jobs.len();
    let mut seen = HashSet::with_capacity(n);
    for job in &raw.jobs {
        for (field, value) in [("p", job.p), ("s", job.s), ("d", job.d), ("w", job.w)] {
            if value < 1 {
                violations.push(Violation::NonPositiveField { id: job.id, field, value });
            }
        }
        if job.r < 0 {
            violations.push(Violation::NegativeReadyTime { id: job.id, value: job.r });
        }
        if raw.capacity >= 1 && job.s > raw.capacity {
            violations.push(Violation::OversizedJob { id: job.id, size: job.s, capacity: raw.capacity });
        }
        if !seen.insert(job.id) {
            violations.push(Violation::DuplicateId(job.id));
        } else if job.id < 1 || job.id as u128 > n as u128 {
            violations.push(Violation::IdOutOfRange { id: job.id, job_count: n });
        }
    }
    if !violations.is_empty() {
        return Err(InvalidInstance(violations));
    }
    let mut jobs: Vec<Job> = raw
        .jobs
        .iter()
        .map(|j| Job {
            id: JobId(j.id as u32),
            processing: j.p as u64,
            size: j.s as u64,
            due: j.d as u64,
            ready: j.r as u64,
            weight: j.w as u64,
        })
        .collect();
    jobs.sort_by_key(|j| j.id);
    Ok(Instance { capacity: raw.capacity as u64, jobs })
}

impl Instance {
    pub fn new(capacity: u64, jobs: Vec<Job>) -> Result<Self, InvalidInstance> {
        let raw = RawInstance {
            capacity: capacity.min(i64::MAX as u64) as i64,
            jobs: jobs
                .iter()
                .map(|j| RawJob {
                    id: j.id.0 as i64,
                    p: j.processing as i64,
                    s: j.size as i64,
                    d: j.due as i64,
                    r: j.ready as i64,
                    w: j.weight as i64,
                })
                .collect(),
        };
        validate_instance(&raw)
    }

    /// Convenience constructor from `(p, s, d)` triples with ids assigned in order.
    pub fn from_triples(capacity: u64, triples: &[(u64, u64, u64)]) -> Result<Self, InvalidInstance> {
        let jobs = triples
            .iter()
            .enumerate()
            .map(|(i, &(p, s, d))| Job::new(i as u32 + 1, p, s, d))
            .collect();
        Instance::new(capacity, jobs)
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            capacity: self.capacity as i64,
            jobs: self
                .jobs
                .iter()
                .map(|j| RawJob {
                    id: j.id.0 as i64,
                    p: j.processing as i64,
                    s: j.size as i64,
                    d: j.due as i64,
                    r: j.ready as i64,
                    w: j.weight as i64,
                })
                .collect(),
        }
    }

    #[inline]
    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    #[inline]
    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    #[inline]
    pub fn job(&self, id: JobId) -> &Job {
        &self.jobs[id.index()]
    }

    pub fn contains(&self, id: JobId) -> bool {
        id.0 >= 1 && (id.0 as usize) <= self.jobs.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = JobId> + '_ {
        self.jobs.iter().map(|j| j.id)
    }

    /// Number of jobs with `p > d`; no schedule can have fewer tardy jobs.
    pub fn tardy_lower_bound(&self) -> usize {
        self.jobs.iter().filter(|j| j.intrinsically_tardy()).count()
    }

    pub fn total_processing(&self) -> u64 {
        self.jobs.iter().map(|j| j.processing).sum()
    }
}

pub type Batch = Vec<JobId>;

/// An evaluated schedule: batches in processing order with their derived timing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchSchedule {
    batches: Vec<Batch>,
    processing: Vec<u64>,
    completion: Vec<u64>,
    job_completion: Vec<u64>,
    tardy: Vec<bool>,
}

/// Objective value of a schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub tardy_count: usize,
    pub tardy_job_ids: Vec<JobId>,
    pub makespan: u64,
}

impl BatchSchedule {
    /// Validates that `batches` partition the instance and respect capacity, then
    /// derives timings.
    pub fn evaluate(instance: &Instance, batches: Vec<Batch>) -> Result<Self, ScheduleError> {
        check_partition(instance, &batches)?;
        Ok(Self::evaluate_unchecked(instance, batches))
    }

    /// Derives timings without feasibility checks. Callers must pass a partition.
    pub(crate) fn evaluate_unchecked(instance: &Instance, batches: Vec<Batch>) -> Self {
        let n = instance.len();
        let mut processing = Vec::with_capacity(batches.len());
        let mut completion = Vec::with_capacity(batches.len());
        let mut job_completion = vec![0; n];
        let mut tardy = vec![false; n];
        let mut clock = 0u64;
        for batch in &batches {
            let p = batch.iter().map(|&id| instance.job(id).processing).max().unwrap_or(0);
            clock += p;
            processing.push(p);
            completion.push(clock);
            for &id in batch {
                job_completion[id.index()] = clock;
                tardy[id.index()] = clock > instance.job(id).due;
            }
        }
        BatchSchedule { batches, processing, completion, job_completion, tardy }
    }

    pub fn batches(&self) -> &[Batch] {
        &self.batches
    }

    pub fn into_batches(self) -> Vec<Batch> {
        self.batches
    }

    /// Batch processing times `P_b` in processing order.
    pub fn batch_processing(&self) -> &[u64] {
        &self.processing
    }

    /// Batch completion times `C_b` in processing order.
    pub fn batch_completion(&self) -> &[u64] {
        &self.completion
    }

    pub fn completion_of(&self, id: JobId) -> u64 {
        self.job_completion[id.index()]
    }

    pub fn is_tardy(&self, id: JobId) -> bool {
        self.tardy[id.index()]
    }

    pub fn tardy_count(&self) -> usize {
        self.tardy.iter().filter(|&&t| t).count()
    }

    pub fn makespan(&self) -> u64 {
        self.completion.last().copied().unwrap_or(0)
    }

    pub fn summary(&self) -> SolutionSummary {
        let tardy_job_ids = self
            .tardy
            .iter()
            .enumerate()
            .filter(|(_, &t)| t)
            .map(|(i, _)| JobId::from_index(i))
            .collect::<Vec<_>>();
        SolutionSummary { tardy_count: tardy_job_ids.len(), tardy_job_ids, makespan: self.makespan() }
    }

    /// Job sequence obtained by reading batches in processing order; members of
    /// a batch are listed by due date, then id.
    pub fn job_sequence(&self, instance: &Instance) -> Vec<JobId> {
        let mut seq = Vec::with_capacity(instance.len());
        for batch in &self.batches {
            let start = seq.len();
            seq.extend_from_slice(batch);
            seq[start..].sort_by_key(|&id| (instance.job(id).due, id));
        }
        seq
    }
}

/// Evaluates a batching and returns the timed schedule with its summary.
pub fn evaluate(
    instance: &Instance,
    batches: &[Batch],
) -> Result<(BatchSchedule, SolutionSummary), ScheduleError> {
    let schedule = BatchSchedule::evaluate(instance, batches.to_vec())?;
    let summary = schedule.summary();
    Ok((schedule, summary))
}

/// Tardy count of a trusted batching, without allocation.
pub(crate) fn count_tardy(instance: &Instance, batches: &[Batch]) -> usize {
    let mut clock = 0u64;
    let mut tardy = 0;
    for batch in batches {
        clock += batch.iter().map(|&id| instance.job(id).processing).max().unwrap_or(0);
        tardy += batch.iter().filter(|&&id| clock > instance.job(id).due).count();
    }
    tardy
}

pub(crate) fn batch_load(instance: &Instance, batch: &[JobId]) -> u64 {
    batch.iter().map(|&id| instance.job(id).size).sum()
}

/// Fails unless every job appears in exactly one batch and each batch fits.
pub fn check_partition(instance: &Instance, batches: &[Batch]) -> Result<(), ScheduleError> {
    let mut seen = vec![false; instance.len()];
    for (b, batch) in batches.iter().enumerate() {
        if batch.is_empty() {
            return Err(ScheduleError::NotAPartition(format!("batch {} is empty", b + 1)));
        }
        for &id in batch {
            if !instance.contains(id) {
                return Err(ScheduleError::UnknownJob(id));
            }
            if std::mem::replace(&mut seen[id.index()], true) {
                return Err(ScheduleError::NotAPartition(format!("job {id} appears more than once")));
            }
        }
        let load = batch_load(instance, batch);
        if load > instance.capacity() {
            return Err(ScheduleError::CapacityViolation { batch: b + 1, load, capacity: instance.capacity() });
        }
    }
    if let Some(i) = seen.iter().position(|&s| !s) {
        return Err(ScheduleError::NotAPartition(format!("job {} is not scheduled", JobId::from_index(i))));
    }
    Ok(())
}

/// Fails unless `sequence` lists every job of the instance exactly once.
pub fn check_permutation(instance: &Instance, sequence: &[JobId]) -> Result<(), ScheduleError> {
    if sequence.len() != instance.len() {
        return Err(ScheduleError::NotAPermutation(format!(
            "expected {} jobs, got {}",
            instance.len(),
            sequence.len()
        )));
    }
    let mut seen = vec![false; instance.len()];
    for &id in sequence {
        if !instance.contains(id) {
            return Err(ScheduleError::UnknownJob(id));
        }
        if std::mem::replace(&mut seen[id.index()], true) {
            return Err(ScheduleError::NotAPermutation(format!("job {id} repeated")));
        }
    }
    Ok(())
}

/// Decodes a job sequence with deterministic first-fit and evaluates it. This is
/// the fitness used by path relinking.
pub fn tardy_count_of_sequence(
    instance: &Instance,
    sequence: &[JobId],
    mode: DecodeMode,
) -> Result<SolutionSummary, ScheduleError> {
    check_permutation(instance, sequence)?;
    Ok(construction::decode(instance, sequence, mode).summary())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{greedy_example as table1, moves_example as table4};

    fn ids(v: &[u32]) -> Batch {
        v.iter().map(|&i| JobId(i)).collect()
    }

    #[test]
    fn nine_job_example_validates() {
        let inst = table1();
        assert_eq!(inst.len(), 9);
        assert_eq!(inst.capacity(), 40);
    }

    #[test]
    fn minimal_instance() {
        let inst = Instance::from_triples(1, &[(1, 1, 1)]).unwrap();
        let (_, summary) = evaluate(&inst, &[ids(&[1])]).unwrap();
        assert_eq!(summary.tardy_count, 0);
    }

    #[test]
    fn oversized_job_rejected() {
        let err = Instance::from_triples(40, &[(5, 41, 10)]).unwrap_err();
        assert!(matches!(err.violations()[0], Violation::OversizedJob { size: 41, capacity: 40, .. }));
    }

    #[test]
    fn every_violation_is_listed() {
        let raw = RawInstance {
            capacity: 10,
            jobs: vec![
                RawJob { id: 1, p: 0, s: 11, d: 5, r: 0, w: 1 },
                RawJob { id: 1, p: 3, s: 2, d: -1, r: -2, w: 1 },
            ],
        };
        let err = validate_instance(&raw).unwrap_err();
        let v = err.violations();
        assert!(v.contains(&Violation::NonPositiveField { id: 1, field: "p", value: 0 }));
        assert!(v.contains(&Violation::OversizedJob { id: 1, size: 11, capacity: 10 }));
        assert!(v.contains(&Violation::DuplicateId(1)));
        assert!(v.contains(&Violation::NonPositiveField { id: 1, field: "d", value: -1 }));
        assert!(v.contains(&Violation::NegativeReadyTime { id: 1, value: -2 }));
    }

    #[test]
    fn empty_and_gapped_ids_rejected() {
        let err = validate_instance(&RawInstance { capacity: 5, jobs: vec![] }).unwrap_err();
        assert_eq!(err.violations(), &[Violation::EmptyInstance]);
        let raw = RawInstance {
            capacity: 5,
            jobs: vec![RawJob { id: 1, p: 1, s: 1, d: 1, r: 0, w: 1 }, RawJob { id: 3, p: 1, s: 1, d: 1, r: 0, w: 1 }],
        };
        assert!(matches!(
            validate_instance(&raw).unwrap_err().violations()[0],
            Violation::IdOutOfRange { id: 3, .. }
        ));
    }

    #[test]
    fn classic_trace_schedule() {
        let inst = table1();
        let batches = vec![ids(&[5, 4, 1]), ids(&[3, 2]), ids(&[7, 8]), ids(&[9]), ids(&[6])];
        let (s, summary) = evaluate(&inst, &batches).unwrap();
        assert_eq!(s.batch_processing(), &[19, 44, 37, 43, 23]);
        assert_eq!(s.batch_completion(), &[19, 63, 100, 143, 166]);
        assert_eq!(summary.tardy_count, 6);
        assert_eq!(summary.tardy_job_ids, ids(&[2, 3, 6, 7, 8, 9]));
        assert_eq!(count_tardy(&inst, &batches), 6);
    }

    #[test]
    fn improved_trace_schedule() {
        let inst = table1();
        let batches = vec![ids(&[4, 2, 5, 8]), ids(&[1, 6]), ids(&[3]), ids(&[7]), ids(&[9])];
        let (s, summary) = evaluate(&inst, &batches).unwrap();
        assert_eq!(s.batch_completion(), &[28, 51, 95, 132, 175]);
        assert_eq!(summary.tardy_job_ids, ids(&[1, 3, 6, 7, 9]));
    }

    #[test]
    fn due_date_boundary_is_on_time() {
        let inst = Instance::from_triples(10, &[(5, 1, 5)]).unwrap();
        let (s, summary) = evaluate(&inst, &[ids(&[1])]).unwrap();
        assert_eq!(s.completion_of(JobId(1)), 5);
        assert_eq!(summary.tardy_count, 0);
    }

    #[test]
    fn infeasible_batchings_rejected() {
        let inst = table4();
        let dup = vec![ids(&[2, 3, 6, 7, 8]), ids(&[4, 9, 2]), ids(&[5]), ids(&[1])];
        assert!(matches!(evaluate(&inst, &dup), Err(ScheduleError::NotAPartition(_))));
        let missing = vec![ids(&[2, 3, 6, 7, 8]), ids(&[4, 9]), ids(&[5])];
        assert!(matches!(evaluate(&inst, &missing), Err(ScheduleError::NotAPartition(_))));
        let over = vec![ids(&[2, 3, 6, 7, 8, 1]), ids(&[4, 9]), ids(&[5])];
        assert!(matches!(evaluate(&inst, &over), Err(ScheduleError::CapacityViolation { batch: 1, .. })));
    }

    #[test]
    fn sequence_fitness() {
        let inst = table1();
        let seq = ids(&[5, 4, 3, 1, 7, 2, 8, 9, 6]);
        let s = tardy_count_of_sequence(&inst, &seq, DecodeMode::Classic).unwrap();
        assert_eq!(s.tardy_count, 6);
        let bad = ids(&[5, 4, 3, 1, 7, 2, 8, 9, 9]);
        assert!(matches!(
            tardy_count_of_sequence(&inst, &bad, DecodeMode::Classic),
            Err(ScheduleError::NotAPermutation(_))
        ));
    }

    #[test]
    fn moves_example_edd_decode_all_tardy() {
        let inst = table4();
        let seq = ids(&[2, 3, 6, 7, 4, 9, 5, 1, 8]);
        let d = construction::decode(&inst, &seq, DecodeMode::Classic);
        assert_eq!(d.batches(), &[ids(&[2, 3, 6, 7, 8]), ids(&[4, 9]), ids(&[5]), ids(&[1])]);
        assert_eq!(d.tardy_count(), 9);
    }
}
