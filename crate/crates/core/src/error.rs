use std::fmt;

use thiserror::Error;

use crate::model::JobId;

/// A single violated instance invariant, reported during validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyInstance,
    NonPositiveCapacity(i64),
    NonPositiveField { id: i64, field: &'static str, value: i64 },
    NegativeReadyTime { id: i64, value: i64 },
    OversizedJob { id: i64, size: i64, capacity: i64 },
    DuplicateId(i64),
    IdOutOfRange { id: i64, job_count: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyInstance => write!(f, "instance has no jobs"),
            Violation::NonPositiveCapacity(c) => write!(f, "capacity must be positive, got {c}"),
            Violation::NonPositiveField { id, field, value } => {
                write!(f, "job {id}: field `{field}` must be positive, got {value}")
            }
            Violation::NegativeReadyTime { id, value } => {
                write!(f, "job {id}: ready time must be non-negative, got {value}")
            }
            Violation::OversizedJob { id, size, capacity } => {
                write!(f, "job {id}: size {size} exceeds machine capacity {capacity}")
            }
            Violation::DuplicateId(id) => write!(f, "duplicate job id {id}"),
            Violation::IdOutOfRange { id, job_count } => {
                write!(f, "job id {id} outside 1..={job_count}")
            }
        }
    }
}

/// Every violation found while validating a raw instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid instance: {}", join(.0))]
pub struct InvalidInstance(pub Vec<Violation>);

impl InvalidInstance {
    pub fn violations(&self) -> &[Violation] {
        &self.0
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Errors raised when a candidate schedule does not describe a feasible batching.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("batches are not a partition of the job set: {0}")]
    NotAPartition(String),
    #[error("batch {batch} has total size {load} above capacity {capacity}")]
    CapacityViolation { batch: usize, load: u64, capacity: u64 },
    #[error("sequence is not a permutation of the job set: {0}")]
    NotAPermutation(String),
    #[error("invalid batch position {position} (schedule has {len} batches)")]
    InvalidPosition { position: usize, len: usize },
    #[error("job {0} is not part of the instance")]
    UnknownJob(JobId),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Invalid(#[from] InvalidInstance),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("instance has {n} jobs, above the exhaustive search limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("path relinking needs at least 2 pool entries, found {0}")]
    PoolTooSmall(usize),
    #[error("sequences are not permutations of the same job set")]
    NotSamePermutationSet,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {what}: {source}")]
    Parse {
        what: &'static str,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
