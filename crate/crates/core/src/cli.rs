//! Command-line interface. `run` returns the process exit code:
//! 0 success, 1 usage, 2 invalid input, 3 internal or i/o failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bench::{run_bench, save_bench_csv, write_bench_csv, BenchCell, BenchSpec, BASELINE_LABEL};
use crate::construction::RclConfig;
use crate::error::Error;
use crate::generator::{generate, GenConfig, GenMeta, GAMMA_LEVELS};
use crate::grasp::{solve, GraspConfig};
use crate::io::{
    load_instance, load_solution, read_json, save_instance, save_log_csv, write_json, GoldenFile, InstanceFile,
    ReportFile, SolutionFile, TraceBlock,
};
use crate::milp::{build_model_with, ModelOptions};
use crate::oracle::{exhaustive_optimum, DEFAULT_LIMIT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tardybatch", version, about = "Minimize tardy jobs on a capacitated batch processing machine")]
struct Cli {
    /// Random seed for generation and solving.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress human-readable output.
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Print a JSON summary on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random instance.
    Generate(GenerateArgs),
    /// Solve an instance with GRASP and path relinking.
    Solve(SolveArgs),
    /// Re-evaluate a solution file against its instance.
    Verify(VerifyArgs),
    /// Exact optimum by exhaustive search (small instances).
    Oracle(OracleArgs),
    /// Write the mixed-integer model in LP format.
    ExportMilp(ExportArgs),
    /// Compare GRASP with the construction-only baseline on generated instances.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(short, long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 40)]
    capacity: u64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Size range `lo,hi`.
    #[arg(long, value_parser = parse_range)]
    sizes: Option<(u64, u64)>,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Candidate list size: `3` or `10%`.
    #[arg(long, default_value = "10%")]
    rcl: RclConfig,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 1000)]
    pr_iters: usize,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Consecutive non-improving local-search samples (default 50n).
    #[arg(long)]
    ls_budget: Option<usize>,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Stop a run after this many iterations without improvement.
    #[arg(long)]
    no_improve: Option<usize>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Wall-clock cap in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

impl SolverArgs {
    fn config(&self, seed: u64) -> Result<GraspConfig, Error> {
        let time_limit = match self.time_limit {
            Some(t) if !(t.is_finite() && t > 0.0) => return Err(Error::Config("time limit must be positive".into())),
            t => t.map(Duration::from_secs_f64),
        };
        let cfg = GraspConfig {
            max_iters: self.iters,
            pr_iters: self.pr_iters,
            rcl: self.rcl,
            alpha: self.alpha,
            ls_budget: self.ls_budget,
            num_runs: self.runs,
            no_improve_limit: self.no_improve,
            seed,
            threads: self.threads,
            time_limit,
            ..GraspConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Solution file.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Solve report (JSON).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Iteration log (CSV).
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    instance: PathBuf,
    solution: PathBuf,
    /// Largest instance compared against the exact optimum.
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    oracle_limit: usize,
}

#[derive(Debug, Args)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
    /// Write a golden file pinning the optimum.
    #[arg(long)]
    golden: Option<PathBuf>,
    /// Check the optimum against an existing golden file.
    #[arg(long)]
    check: Option<PathBuf>,
    /// Write the optimal schedule as a solution file.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    instance: PathBuf,
    /// LP file; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Add rows that place occupied batch slots before empty ones.
    #[arg(long)]
    slot_order_cuts: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Job counts, comma separated.
    #[arg(short, long, value_delimiter = ',', default_values_t = [10usize, 20, 50])]
    n: Vec<usize>,
    /// Gamma levels, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = GAMMA_LEVELS)]
    gammas: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output directory for `bench.csv`; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let lo = lo.trim().parse().map_err(|_| format!("bad number `{lo}`"))?;
    let hi = hi.trim().parse().map_err(|_| format!("bad number `{hi}`"))?;
    Ok((lo, hi))
}

struct Ctx<'a> {
    quiet: bool,
    json: bool,
    seed: u64,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn say(&mut self, line: impl std::fmt::Display) {
        if !self.quiet && !self.json {
            let _ = writeln!(self.out, "{line}");
        }
    }

    fn emit_json(&mut self, value: serde_json::Value) {
        if self.json {
            let _ = writeln!(self.out, "{value}");
        }
    }
}

/// Failure with a chosen exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) => EXIT_USAGE,
            Error::Invalid(_)
            | Error::Schedule(_)
            | Error::Parse { .. }
            | Error::TooLarge { .. }
            | Error::NotSamePermutationSet => EXIT_INVALID,
            Error::Io { .. } | Error::PoolTooSmall(_) => EXIT_INTERNAL,
        };
        let message = match &e {
            Error::Invalid(inv) => {
                let mut m = String::from("invalid instance:");
                for v in inv.violations() {
                    m.push_str(&format!("\n  - {v}"));
                }
                m
            }
            other => other.to_string(),
        };
        Failure { code, message }
    }
}

fn invalid(message: String) -> Failure {
    Failure { code: EXIT_INVALID, message }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };
    let mut ctx = Ctx { quiet: cli.quiet, json: cli.json, seed: cli.seed, out };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(&mut ctx, a),
        Command::Solve(a) => cmd_solve(&mut ctx, a),
        Command::Verify(a) => cmd_verify(&mut ctx, a),
        Command::Oracle(a) => cmd_oracle(&mut ctx, a),
        Command::ExportMilp(a) => cmd_export(&mut ctx, a),
        Command::Bench(a) => cmd_bench(&mut ctx, a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn cmd_generate(ctx: &mut Ctx, a: GenerateArgs) -> Result<(), Failure> {
    let mut cfg = GenConfig { n: a.n as usize, capacity: a.capacity, gamma: a.gamma, seed: ctx.seed, ..GenConfig::default() };
    if let Some(r) = a.sizes {
        cfg.size_range = r;
    }
    cfg.validate()?;
    let instance = generate(&cfg)?;
    let meta = GenMeta::new(&cfg);
    match &a.out {
        Some(path) => {
            save_instance(path, &instance, Some(meta))?;
            ctx.say(format!("wrote {} jobs to {}", instance.len(), path.display()));
            ctx.emit_json(json!({ "jobs": instance.len(), "capacity": instance.capacity(), "out": path }));
        }
        None => {
            let text = serde_json::to_string_pretty(&InstanceFile::new(&instance, Some(meta))).expect("serializable");
            let _ = writeln!(ctx.out, "{text}");
        }
    }
    Ok(())
}

fn cmd_solve(ctx: &mut Ctx, a: SolveArgs) -> Result<(), Failure> {
    let instance = load_instance(&a.instance)?;
    let cfg = a.solver.config(ctx.seed)?;
    let report = solve(&instance, &cfg)?;
    if let Some(path) = &a.out {
        let mut file = SolutionFile::from_schedule(&report.best);
        file.trace = Some(TraceBlock { rule: report.construction_rule, picks: report.construction_trace.clone() });
        write_json(path, &file)?;
    }
    let summary = ReportFile::new(&instance, &report, &cfg);
    if let Some(path) = &a.report {
        write_json(path, &summary)?;
    }
    if let Some(path) = &a.log {
        save_log_csv(path, &report.log)?;
    }
    ctx.say(format!(
        "tardy {} of {} (lower bound {}), makespan {}",
        summary.tardy_count,
        instance.len(),
        summary.lower_bound,
        summary.makespan
    ));
    ctx.say(format!(
        "construction {} -> local search {} -> path relinking {}",
        summary.construction_best,
        summary.local_search_best,
        summary.path_relinking_best.map_or_else(|| "skipped".to_string(), |t| t.to_string())
    ));
    ctx.say(format!("{} iterations in {} ms", summary.iterations_run, summary.elapsed_ms));
    ctx.emit_json(serde_json::to_value(&summary).expect("serializable"));
    Ok(())
}

fn cmd_verify(ctx: &mut Ctx, a: VerifyArgs) -> Result<(), Failure> {
    let instance = load_instance(&a.instance)?;
    let file = load_solution(&a.solution)?;
    let schedule = file.evaluate(&instance)?;
    let tardy = schedule.tardy_count();
    if file.tardy_count != tardy {
        return Err(invalid(format!("solution claims {} tardy jobs but evaluates to {tardy}", file.tardy_count)));
    }
    let optimum = if instance.len() <= a.oracle_limit {
        Some(exhaustive_optimum(&instance, a.oracle_limit)?.optimum_tardy)
    } else {
        None
    };
    match optimum {
        Some(opt) => ctx.say(format!("feasible, tardy={tardy}, optimum={opt}, gap={}", tardy - opt)),
        None => ctx.say(format!("feasible, tardy={tardy}")),
    }
    ctx.emit_json(json!({
        "feasible": true,
        "tardy_count": tardy,
        "makespan": schedule.makespan(),
        "optimum_tardy": optimum,
        "gap": optimum.map(|o| tardy - o),
    }));
    Ok(())
}

fn cmd_oracle(ctx: &mut Ctx, a: OracleArgs) -> Result<(), Failure> {
    let instance = load_instance(&a.instance)?;
    let result = exhaustive_optimum(&instance, a.limit)?;
    let golden = GoldenFile::new(&instance, &result);
    if let Some(path) = &a.check {
        let pinned: GoldenFile = read_json(path, "golden file")?;
        if pinned.instance_sha256 != golden.instance_sha256 {
            return Err(invalid("golden file belongs to a different instance".into()));
        }
        if pinned.optimum_tardy != result.optimum_tardy || !pinned.matches(&instance) {
            return Err(invalid(format!(
                "golden optimum {} disagrees with computed optimum {}",
                pinned.optimum_tardy, result.optimum_tardy
            )));
        }
    }
    if let Some(path) = &a.golden {
        write_json(path, &golden)?;
    }
    if let Some(path) = &a.out {
        write_json(path, &SolutionFile::from_schedule(&result.witness))?;
    }
    ctx.say(format!(
        "optimum tardy {} ({} partitions, {} nodes)",
        result.optimum_tardy, result.partitions_evaluated, result.nodes_explored
    ));
    ctx.emit_json(json!({
        "optimum_tardy": result.optimum_tardy,
        "witness": golden.witness,
        "instance_sha256": golden.instance_sha256,
        "partitions_evaluated": result.partitions_evaluated,
    }));
    Ok(())
}

fn cmd_export(ctx: &mut Ctx, a: ExportArgs) -> Result<(), Failure> {
    let instance = load_instance(&a.instance)?;
    let model = build_model_with(&instance, ModelOptions { slot_order_cuts: a.slot_order_cuts });
    match &a.out {
        Some(path) => {
            model.write_lp(path)?;
            ctx.say(format!(
                "wrote {} rows, {} binaries, {} continuous to {}",
                model.rows.len(),
                model.binary_count(),
                model.continuous_count(),
                path.display()
            ));
            ctx.emit_json(json!({
                "rows": model.rows.len(),
                "binaries": model.binary_count(),
                "continuous": model.continuous_count(),
                "big_m": model.big_m,
            }));
        }
        None => {
            let _ = write!(ctx.out, "{}", model.to_lp_string());
        }
    }
    Ok(())
}

fn cmd_bench(ctx: &mut Ctx, a: BenchArgs) -> Result<(), Failure> {
    let solver = a.solver.config(ctx.seed)?;
    let cells = a
        .n
        .iter()
        .flat_map(|&n| a.gammas.iter().map(move |&gamma| BenchCell { n, gamma, reps: a.reps }))
        .collect();
    let spec = BenchSpec { cells, solver, master_seed: ctx.seed };
    let report = run_bench(&spec)?;
    let mut csv_on_stdout = false;
    match &a.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
            let path = dir.join("bench.csv");
            save_bench_csv(&path, &report)?;
            ctx.say(format!("wrote {}", path.display()));
        }
        None if !ctx.json => {
            write_bench_csv(&mut *ctx.out, &report)
                .map_err(|e| Failure { code: EXIT_INTERNAL, message: e.to_string() })?;
            csv_on_stdout = true;
        }
        None => {}
    }
    if !csv_on_stdout {
        ctx.say(format!("baseline: {BASELINE_LABEL}"));
    }
    for c in report.cells.iter().filter(|_| !csv_on_stdout) {
        ctx.say(format!(
            "n={:<4} gamma={:<5} baseline {:>7.2}  grasp {:>7.2}  improvement {}",
            c.n,
            c.gamma,
            c.mean_baseline_tardy,
            c.mean_grasp_tardy,
            c.mean_improvement.map_or_else(|| "n/a".to_string(), |x| format!("{:.2}%", 100.0 * x))
        ));
    }
    ctx.emit_json(json!({
        "baseline": BASELINE_LABEL,
        "cells": report.cells.iter().map(|c| json!({
            "n": c.n,
            "gamma": c.gamma,
            "reps": c.reps,
            "mean_baseline_tardy": c.mean_baseline_tardy,
            "mean_grasp_tardy": c.mean_grasp_tardy,
            "mean_improvement": c.mean_improvement,
            "undefined_improvements": c.undefined_improvements,
            "mean_runtime_ms": c.mean_runtime_ms,
        })).collect::<Vec<_>>(),
    }));
    Ok(())
}
