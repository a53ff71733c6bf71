//! Minimizing the number of tardy jobs on a single capacitated batch
//! processing machine with GRASP and path relinking.

pub mod bench;
pub mod cli;
pub mod construction;
pub mod error;
pub mod fixtures;
pub mod generator;
pub mod grasp;
pub mod io;
pub mod local_search;
pub mod milp;
pub mod model;
pub mod oracle;
pub mod path_relinking;

#[cfg(test)]
mod testdata;

pub use construction::{DecodeMode, PriorityRule, RclConfig};
pub use error::{Error, InvalidInstance, Result, ScheduleError, Violation};
pub use generator::{generate, GenConfig};
pub use grasp::{solve, GraspConfig, SolveReport};
pub use model::{Batch, BatchSchedule, Instance, Job, JobId, RawInstance, SolutionSummary};
