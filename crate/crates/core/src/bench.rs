//! Benchmark sweeps: generated instances per (n, gamma) cell, full GRASP
//! against the construction-only baseline.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{generate, GenConfig, GAMMA_LEVELS};
use crate::grasp::{construction_baseline, derive_seed, improvement_pct, solve, GraspConfig};

pub const BASELINE_LABEL: &str = "best-of-10 improved construction";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub n: usize,
    pub gamma: f64,
    pub reps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub cells: Vec<BenchCell>,
    /// Solver settings; its seed is replaced per replication.
    pub solver: GraspConfig,
    pub master_seed: u64,
}

impl BenchSpec {
    /// One cell per default gamma level for each `n`.
    pub fn grid(ns: &[usize], reps: usize, solver: GraspConfig, master_seed: u64) -> Self {
        let cells = ns
            .iter()
            .flat_map(|&n| GAMMA_LEVELS.iter().map(move |&gamma| BenchCell { n, gamma, reps }))
            .collect();
        BenchSpec { cells, solver, master_seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::Config("bench needs at least one cell".into()));
        }
        for c in &self.cells {
            if c.reps == 0 || c.n == 0 {
                return Err(Error::Config(format!("cell n={} gamma={} needs n >= 1 and reps >= 1", c.n, c.gamma)));
            }
            GenConfig::new(c.n, c.gamma, 0).validate()?;
        }
        self.solver.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepResult {
    pub cell: usize,
    pub rep: usize,
    pub n: usize,
    pub gamma: f64,
    pub instance_seed: u64,
    pub baseline_tardy: usize,
    pub grasp_tardy: usize,
    pub improvement: Option<f64>,
    pub runtime_ms: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellSummary {
    pub cell: usize,
    pub n: usize,
    pub gamma: f64,
    pub reps: usize,
    pub mean_baseline_tardy: f64,
    pub mean_grasp_tardy: f64,
    /// Mean over replications where the improvement is defined.
    pub mean_improvement: Option<f64>,
    pub undefined_improvements: usize,
    pub mean_runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub reps: Vec<RepResult>,
    pub cells: Vec<CellSummary>,
}

fn run_rep(spec: &BenchSpec, cell: usize, rep: usize) -> Result<RepResult> {
    let c = &spec.cells[cell];
    let instance_seed = derive_seed(spec.master_seed, cell as u64, rep as u64);
    let instance = generate(&GenConfig::new(c.n, c.gamma, instance_seed))?;
    let config = GraspConfig { seed: instance_seed, ..spec.solver.clone() };
    let start = Instant::now();
    let report = solve(&instance, &config)?;
    let runtime_ms = start.elapsed().as_millis() as u64;
    let baseline_tardy = construction_baseline(&instance, &config).tardy_count();
    let grasp_tardy = report.summary.tardy_count;
    Ok(RepResult {
        cell,
        rep,
        n: c.n,
        gamma: c.gamma,
        instance_seed,
        baseline_tardy,
        grasp_tardy,
        improvement: improvement_pct(baseline_tardy, grasp_tardy),
        runtime_ms,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Runs every replication, concurrently, and summarizes per cell.
pub fn run_bench(spec: &BenchSpec) -> Result<BenchReport> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> =
        spec.cells.iter().enumerate().flat_map(|(i, c)| (0..c.reps).map(move |r| (i, r))).collect();
    let reps = jobs.par_iter().map(|&(cell, rep)| run_rep(spec, cell, rep)).collect::<Result<Vec<_>>>()?;
    let cells = spec
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let rows: Vec<&RepResult> = reps.iter().filter(|r| r.cell == i).collect();
            CellSummary {
                cell: i,
                n: c.n,
                gamma: c.gamma,
                reps: rows.len(),
                mean_baseline_tardy: mean(rows.iter().map(|r| r.baseline_tardy as f64)).unwrap_or(0.0),
                mean_grasp_tardy: mean(rows.iter().map(|r| r.grasp_tardy as f64)).unwrap_or(0.0),
                mean_improvement: mean(rows.iter().filter_map(|r| r.improvement)),
                undefined_improvements: rows.iter().filter(|r| r.improvement.is_none()).count(),
                mean_runtime_ms: mean(rows.iter().map(|r| r.runtime_ms as f64)).unwrap_or(0.0),
            }
        })
        .collect();
    Ok(BenchReport { reps, cells })
}

#[derive(Serialize)]
struct CsvRow {
    row: &'static str,
    cell: usize,
    n: usize,
    gamma: f64,
    rep: String,
    instance_seed: String,
    baseline: &'static str,
    baseline_tardy: String,
    grasp_tardy: String,
    improvement_pct: String,
    runtime_ms: String,
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{:.2}", 100.0 * x))
}

/// One row per replication followed by one aggregate row per cell.
/// Improvements are percentages; negative means the baseline was better.
pub fn write_bench_csv<W: std::io::Write>(out: W, report: &BenchReport) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for cell in &report.cells {
        for r in report.reps.iter().filter(|r| r.cell == cell.cell) {
            w.serialize(CsvRow {
                row: "rep",
                cell: r.cell,
                n: r.n,
                gamma: r.gamma,
                rep: r.rep.to_string(),
                instance_seed: r.instance_seed.to_string(),
                baseline: BASELINE_LABEL,
                baseline_tardy: r.baseline_tardy.to_string(),
                grasp_tardy: r.grasp_tardy.to_string(),
                improvement_pct: pct(r.improvement),
                runtime_ms: r.runtime_ms.to_string(),
            })?;
        }
        w.serialize(CsvRow {
            row: "aggregate",
            cell: cell.cell,
            n: cell.n,
            gamma: cell.gamma,
            rep: format!("{} reps", cell.reps),
            instance_seed: String::new(),
            baseline: BASELINE_LABEL,
            baseline_tardy: format!("{:.3}", cell.mean_baseline_tardy),
            grasp_tardy: format!("{:.3}", cell.mean_grasp_tardy),
            improvement_pct: pct(cell.mean_improvement),
            runtime_ms: format!("{:.1}", cell.mean_runtime_ms),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_bench_csv(path: &Path, report: &BenchReport) -> Result<()> {
    let file = std::fs::File::create(path)
        .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    write_bench_csv(file, report).map_err(|e| Error::Io { path: path.display().to_string(), source: e.into() })
}
