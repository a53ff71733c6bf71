//! File formats: instances, solutions, solve reports, iteration logs, and
//! oracle golden files. Everything except the log is JSON.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::construction::{PickRecord, PriorityRule};
use crate::error::{Error, Result};
use crate::generator::GenMeta;
use crate::grasp::{GraspConfig, LogRow, SolveReport};
use crate::model::{validate_instance, Batch, BatchSchedule, Instance, JobId, RawInstance};
use crate::oracle::OracleResult;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &'static str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| Error::Parse { what, source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Instance file contents. `gen` is present when the instance came from the
/// generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub instance: RawInstance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen: Option<GenMeta>,
}

impl InstanceFile {
    pub fn new(instance: &Instance, gen: Option<GenMeta>) -> Self {
        InstanceFile { instance: instance.to_raw(), gen }
    }

    pub fn validate(&self) -> Result<Instance> {
        Ok(validate_instance(&self.instance)?)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|source| Error::Parse { what: "instance", source })?;
    file.validate()
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    read_json::<InstanceFile>(path, "instance")?.validate()
}

pub fn save_instance(path: &Path, instance: &Instance, gen: Option<GenMeta>) -> Result<()> {
    write_json(path, &InstanceFile::new(instance, gen))
}

/// Hex SHA-256 of the instance's compact JSON form (without generator metadata).
pub fn instance_hash(instance: &Instance) -> String {
    let bytes = serde_json::to_vec(&instance.to_raw()).expect("serializable instance");
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub batches: Vec<Batch>,
    pub tardy_count: usize,
    pub tardy_jobs: Vec<JobId>,
    pub makespan: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceBlock>,
}

/// Pick trace of the construction behind a solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceBlock {
    pub rule: PriorityRule,
    pub picks: Vec<PickRecord>,
}

impl SolutionFile {
    pub fn from_schedule(schedule: &BatchSchedule) -> Self {
        let summary = schedule.summary();
        SolutionFile {
            batches: schedule.batches().to_vec(),
            tardy_count: summary.tardy_count,
            tardy_jobs: summary.tardy_job_ids,
            makespan: summary.makespan,
            trace: None,
        }
    }

    /// Re-evaluates the stored batches; the recorded figures are not trusted.
    pub fn evaluate(&self, instance: &Instance) -> Result<BatchSchedule> {
        Ok(BatchSchedule::evaluate(instance, self.batches.clone())?)
    }
}

pub fn load_solution(path: &Path) -> Result<SolutionFile> {
    read_json(path, "solution")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tardy_count: usize,
    pub tardy_jobs: Vec<JobId>,
    pub makespan: u64,
    pub lower_bound: usize,
    pub construction_best: usize,
    pub first_iteration_construction: usize,
    pub local_search_best: usize,
    pub path_relinking_best: Option<usize>,
    pub construction_rule: PriorityRule,
    pub iterations_run: usize,
    pub elapsed_ms: u64,
    pub config: GraspConfig,
}

impl ReportFile {
    pub fn new(instance: &Instance, report: &SolveReport, config: &GraspConfig) -> Self {
        ReportFile {
            tardy_count: report.summary.tardy_count,
            tardy_jobs: report.summary.tardy_job_ids.clone(),
            makespan: report.summary.makespan,
            lower_bound: instance.tardy_lower_bound(),
            construction_best: report.construction_best,
            first_iteration_construction: report.first_iteration_construction,
            local_search_best: report.local_search_best,
            path_relinking_best: report.path_relinking_best,
            construction_rule: report.construction_rule,
            iterations_run: report.iterations_run,
            elapsed_ms: report.elapsed.as_millis() as u64,
            config: config.clone(),
        }
    }
}

#[derive(Serialize)]
struct CsvLogRow {
    iter: usize,
    phase: &'static str,
    best_tardy: usize,
    elapsed_ms: u64,
}

/// Iteration log as CSV with columns `iter,phase,best_tardy,elapsed_ms`.
pub fn write_log_csv<W: std::io::Write>(out: W, log: &[LogRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in log {
        w.serialize(CsvLogRow {
            iter: row.iter,
            phase: match row.phase {
                crate::grasp::Phase::Grasp => "grasp",
                crate::grasp::Phase::PathRelinking => "path_relinking",
            },
            best_tardy: row.best_tardy,
            elapsed_ms: row.elapsed_ms,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_log_csv(path: &Path, log: &[LogRow]) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    write_log_csv(file, log).map_err(|e| Error::Io { path: path.display().to_string(), source: e.into() })
}

/// Regression pin for an exact optimum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenFile {
    pub instance_sha256: String,
    pub optimum_tardy: usize,
    pub witness: Vec<Batch>,
}

impl GoldenFile {
    pub fn new(instance: &Instance, result: &OracleResult) -> Self {
        GoldenFile {
            instance_sha256: instance_hash(instance),
            optimum_tardy: result.optimum_tardy,
            witness: result.witness.batches().to_vec(),
        }
    }

    /// Whether the pin belongs to `instance` and its witness still evaluates to
    /// the pinned value.
    pub fn matches(&self, instance: &Instance) -> bool {
        self.instance_sha256 == instance_hash(instance)
            && BatchSchedule::evaluate(instance, self.witness.clone())
                .is_ok_and(|s| s.tardy_count() == self.optimum_tardy)
    }
}
